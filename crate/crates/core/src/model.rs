//! Spectrally negative Lévy models and their Laplace exponents.
//!
//! A [`SpectralModel`] is a Gaussian coefficient, a drift and a [`JumpModel`].
//! For the compound-Poisson jump models (hyperexponential, phase-type) the
//! drift is the bounded-variation drift `μ` in
//! `ψ(s) = μs + σ²s²/2 + ∫(e^{sz} - 1) ν(dz)`. For the beta family the drift
//! is the linear coefficient `μ̂` of
//! `ψ(s) = μ̂s + σ²s²/2 + (c/β)[B(α + s/β, 1 - λ) - B(α, 1 - λ)]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta, digamma, ln_beta_signed};

/// Relative distance to a pole under which evaluation is refused.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Tolerance on generator row sums and on simplex sums of fitted parameters.
pub const GENERATOR_TOLERANCE: f64 = 1e-12;
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// `σ > 0`, or infinite-variation jumps.
    UnboundedVariation,
    /// `σ = 0` and `μ > 0` with jumps of bounded variation.
    BoundedVariation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperexponential {
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub rates: Vec<f64>,
}

impl Hyperexponential {
    /// Builds the model with `(weight, rate)` pairs sorted by ascending rate.
    pub fn sorted(lambda: f64, weights: &[f64], rates: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = weights.iter().copied().zip(rates.iter().copied()).collect();
        pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
        Hyperexponential {
            lambda,
            weights: pairs.iter().map(|p| p.0).collect(),
            rates: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// The same jump law written as a phase-type representation with a
    /// diagonal generator.
    pub fn to_phase_type(&self) -> PhaseType {
        let m = self.rates.len();
        let mut generator = vec![vec![0.0; m]; m];
        for (i, row) in generator.iter_mut().enumerate() {
            row[i] = -self.rates[i];
        }
        PhaseType { lambda: self.lambda, alpha: self.weights.clone(), generator }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseType {
    pub lambda: f64,
    pub alpha: Vec<f64>,
    /// Row-major sub-generator `T`.
    pub generator: Vec<Vec<f64>>,
}

impl PhaseType {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn t_matrix(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| self.generator[i][j])
    }

    fn alpha_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.alpha)
    }

    /// Exit-rate vector `t = -T·1`.
    fn exit_vec(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.generator.iter().map(|row| -row.iter().sum::<f64>()))
    }

    /// Eigenvalues of `T` as `(re, im)` pairs.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        self.t_matrix().complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
    }

    /// `α (sI - T)^{-k} t` for `k = 1, 2`; `None` when `sI - T` is singular.
    fn resolvent_forms(&self, s: f64) -> Option<(f64, f64)> {
        let m = self.dim();
        let a = DMatrix::<f64>::identity(m, m) * s - self.t_matrix();
        let lu = a.lu();
        let x = lu.solve(&self.exit_vec())?;
        let y = lu.solve(&x)?;
        let alpha = self.alpha_vec();
        Some((alpha.dot(&x), alpha.dot(&y)))
    }

    fn resolvent_complex(&self, s: Complex64) -> Option<Complex64> {
        let m = self.dim();
        let t = self.t_matrix().map(|v| Complex64::new(v, 0.0));
        let a = DMatrix::<Complex64>::identity(m, m) * s - t;
        let exit = self.exit_vec().map(|v| Complex64::new(v, 0.0));
        let x = a.lu().solve(&exit)?;
        Some(self.alpha.iter().zip(x.iter()).map(|(a, x)| *x * *a).sum())
    }

    fn density(&self, y: f64) -> f64 {
        let e = (self.t_matrix() * y).exp();
        (self.alpha_vec().transpose() * e * self.exit_vec())[(0, 0)]
    }
}

/// Beta-family Lévy measure `ν(dx) = c e^{αβx} / (1 - e^{βx})^λ` on `x < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFamily {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub shape: f64,
}

impl BetaFamily {
    /// `x = α + s/β`, the argument of the first gamma factor.
    fn arg(&self, s: f64) -> f64 {
        self.alpha + s / self.beta
    }

    fn jump_part(&self, s: f64) -> Result<f64> {
        let y = 1.0 - self.shape;
        let b0 = beta(self.alpha, y)?;
        let (l, sign) = ln_beta_signed(self.arg(s), y);
        let bs = sign * l.exp();
        if !bs.is_finite() {
            return Err(Error::NonFiniteSpecialFunction { what: "beta", at: self.arg(s) });
        }
        Ok(self.c / self.beta * (bs - b0))
    }

    fn jump_part_derivative(&self, s: f64) -> Result<f64> {
        let y = 1.0 - self.shape;
        let x = self.arg(s);
        let (l, sign) = ln_beta_signed(x, y);
        let bs = sign * l.exp();
        if !bs.is_finite() {
            return Err(Error::NonFiniteSpecialFunction { what: "beta", at: x });
        }
        Ok(self.c / (self.beta * self.beta) * bs * (digamma(x) - digamma(x + y)))
    }

    /// `η_k = β(α + k - 1)`, `k = 1..=m`.
    pub fn poles(&self, m: usize) -> Vec<f64> {
        (1..=m).map(|k| self.beta * (self.alpha + (k - 1) as f64)).collect()
    }

    fn nearest_pole(&self, s: f64) -> Option<f64> {
        let x = self.arg(s);
        if x > 0.5 {
            return None;
        }
        let k = (-x).round().max(0.0);
        Some(-self.beta * (self.alpha + k))
    }

    /// `ν(-∞, 0)`, finite only for `λ < 1`.
    pub fn total_mass(&self) -> f64 {
        if self.shape < 1.0 {
            beta(self.alpha, 1.0 - self.shape).map(|b| self.c / self.beta * b).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        }
    }

    pub fn density(&self, z: f64) -> f64 {
        self.c * (self.alpha * self.beta * z).exp() / (1.0 - (self.beta * z).exp()).powf(self.shape)
    }
}

/// Spectrally negative CGMY target `ν(dx) = c̃ e^{α̃x}/|x|^λ`, reached as the
/// `β ↓ 0` limit of the beta family under `c = c̃β^λ`, `α = α̃/β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgmyTarget {
    pub c_tilde: f64,
    pub alpha_tilde: f64,
    pub shape: f64,
}

impl CgmyTarget {
    pub fn beta_approximation(&self, beta: f64) -> BetaFamily {
        BetaFamily {
            c: self.c_tilde * beta.powf(self.shape),
            alpha: self.alpha_tilde / beta,
            beta,
            shape: self.shape,
        }
    }

    pub fn density(&self, z: f64) -> f64 {
        self.c_tilde * (self.alpha_tilde * z).exp() / z.abs().powf(self.shape)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JumpModel {
    /// Pure Brownian motion with drift.
    None,
    Hyperexponential(Hyperexponential),
    PhaseType(PhaseType),
    BetaFamily(BetaFamily),
    CgmyTarget(CgmyTarget),
}

impl JumpModel {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        match self {
            JumpModel::None => Ok(()),
            JumpModel::Hyperexponential(h) => {
                if !(h.lambda > 0.0) {
                    return bad(format!("jump rate must be positive, got {}", h.lambda));
                }
                if h.weights.is_empty() || h.weights.len() != h.rates.len() {
                    return bad("weights and rates must be non-empty and of equal length".into());
                }
                if h.weights.iter().any(|w| !(*w > 0.0)) {
                    return bad("hyperexponential weights must be positive".into());
                }
                if (h.weights.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOLERANCE {
                    return bad("hyperexponential weights must sum to 1".into());
                }
                if h.rates[0] <= 0.0 || h.rates.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("hyperexponential rates must be positive and strictly increasing".into());
                }
                Ok(())
            }
            JumpModel::PhaseType(p) => {
                let m = p.dim();
                if !(p.lambda > 0.0) {
                    return bad(format!("jump rate must be positive, got {}", p.lambda));
                }
                if m == 0 || p.generator.len() != m || p.generator.iter().any(|r| r.len() != m) {
                    return bad("generator must be a square matrix matching alpha".into());
                }
                if p.alpha.iter().any(|a| *a < 0.0) || (p.alpha.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOLERANCE {
                    return bad("alpha must be a probability vector".into());
                }
                for (i, row) in p.generator.iter().enumerate() {
                    if !(row[i] < 0.0) {
                        return bad(format!("generator diagonal entry {i} must be negative"));
                    }
                    if row.iter().enumerate().any(|(j, v)| j != i && *v < 0.0) {
                        return bad(format!("generator row {i} has a negative off-diagonal entry"));
                    }
                    if row.iter().sum::<f64>() > GENERATOR_TOLERANCE {
                        return bad(format!("generator row {i} sums to a positive value"));
                    }
                }
                if p.t_matrix().lu().determinant().abs() < 1e-300 {
                    return bad("generator is singular".into());
                }
                Ok(())
            }
            JumpModel::BetaFamily(b) => {
                if !(b.c > 0.0 && b.alpha > 0.0 && b.beta > 0.0) {
                    return bad("beta family needs c, alpha, beta > 0".into());
                }
                check_shape(b.shape)
            }
            JumpModel::CgmyTarget(t) => {
                if !(t.c_tilde > 0.0 && t.alpha_tilde > 0.0) {
                    return bad("CGMY target needs c_tilde, alpha_tilde > 0".into());
                }
                check_shape(t.shape)
            }
        }
    }

    fn infinite_variation(&self) -> bool {
        match self {
            JumpModel::BetaFamily(BetaFamily { shape, .. }) | JumpModel::CgmyTarget(CgmyTarget { shape, .. }) => {
                *shape >= 2.0
            }
            _ => false,
        }
    }

    /// `ν(-∞, 0)`; infinite for infinite-activity jumps.
    pub fn total_rate(&self) -> f64 {
        match self {
            JumpModel::None => 0.0,
            JumpModel::Hyperexponential(h) => h.lambda,
            JumpModel::PhaseType(p) => p.lambda,
            JumpModel::BetaFamily(b) => b.total_mass(),
            JumpModel::CgmyTarget(t) => {
                if t.shape < 1.0 {
                    // c̃ Γ(1-λ) α̃^{λ-1}
                    let (l, s) = crate::special::ln_gamma_signed(1.0 - t.shape);
                    t.c_tilde * s * l.exp() * t.alpha_tilde.powf(t.shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Whether the jump part has finitely many poles.
    pub fn is_finite(&self) -> bool {
        matches!(self, JumpModel::None | JumpModel::Hyperexponential(_) | JumpModel::PhaseType(_))
    }
}

fn check_shape(shape: f64) -> Result<()> {
    if !(shape > 0.0 && shape < 3.0) {
        return Err(Error::InvalidModel(format!("shape must lie in (0, 3), got {shape}")));
    }
    if shape == 1.0 || shape == 2.0 {
        return Err(Error::InvalidModel(format!("shape {shape} makes B(·, 1 - λ) degenerate")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpectralModelSpec {
    sigma: f64,
    drift: f64,
    jumps: JumpModel,
    #[serde(default)]
    case_tag: Option<CaseTag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralModelSpec")]
pub struct SpectralModel {
    sigma: f64,
    drift: f64,
    jumps: JumpModel,
    case_tag: CaseTag,
}

impl TryFrom<SpectralModelSpec> for SpectralModel {
    type Error = Error;

    fn try_from(spec: SpectralModelSpec) -> Result<Self> {
        let model = SpectralModel::new(spec.sigma, spec.drift, spec.jumps)?;
        if let Some(tag) = spec.case_tag {
            if tag != model.case_tag {
                return Err(Error::InvalidModel(format!(
                    "case tag {tag:?} does not match the parameters ({:?})",
                    model.case_tag
                )));
            }
        }
        Ok(model)
    }
}

/// `W(0)`, `W'(0+)` and `θ = -ζ_q W(0) + W'(0+)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryConstants {
    pub w0: f64,
    /// `+∞` for σ = 0 with infinite activity.
    pub wprime0: f64,
    pub theta: f64,
}

impl SpectralModel {
    pub fn new(sigma: f64, drift: f64, jumps: JumpModel) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidModel(format!("sigma must be nonnegative, got {sigma}")));
        }
        if !drift.is_finite() {
            return Err(Error::InvalidModel("drift must be finite".into()));
        }
        jumps.validate()?;
        let case_tag = if sigma > 0.0 || jumps.infinite_variation() {
            CaseTag::UnboundedVariation
        } else {
            if !(drift > 0.0) {
                return Err(Error::InvalidModel(
                    "sigma = 0 requires a positive drift (negative subordinator otherwise)".into(),
                ));
            }
            CaseTag::BoundedVariation
        };
        Ok(SpectralModel { sigma, drift, jumps, case_tag })
    }

    pub fn brownian(sigma: f64, drift: f64) -> Result<Self> {
        Self::new(sigma, drift, JumpModel::None)
    }

    pub fn hyperexponential(sigma: f64, drift: f64, lambda: f64, weights: &[f64], rates: &[f64]) -> Result<Self> {
        Self::new(sigma, drift, JumpModel::Hyperexponential(Hyperexponential::sorted(lambda, weights, rates)))
    }

    pub fn beta_family(sigma: f64, drift: f64, c: f64, alpha: f64, beta: f64, shape: f64) -> Result<Self> {
        Self::new(sigma, drift, JumpModel::BetaFamily(BetaFamily { c, alpha, beta, shape }))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn jumps(&self) -> &JumpModel {
        &self.jumps
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    /// The drift `μ` of the bounded-variation form, `None` for unbounded
    /// variation. The beta-family exponent carries no compensator, so its
    /// linear coefficient already is `μ` whenever the paths have bounded
    /// variation.
    pub fn bounded_variation_drift(&self) -> Option<f64> {
        match self.case_tag {
            CaseTag::BoundedVariation => Some(self.drift),
            CaseTag::UnboundedVariation => None,
        }
    }

    /// Whether `ψ` has finitely many poles (phase-type family).
    pub fn is_finite(&self) -> bool {
        self.jumps.is_finite()
    }

    /// Absolute values of the poles of `ψ` on the negative axis, ascending.
    /// Infinite families return the first `m`.
    pub fn poles(&self, m: usize) -> Result<Vec<f64>> {
        match &self.jumps {
            JumpModel::None => Ok(Vec::new()),
            JumpModel::Hyperexponential(h) => Ok(h.rates.clone()),
            JumpModel::PhaseType(p) => {
                let mut etas = Vec::with_capacity(p.dim());
                for (re, im) in p.eigenvalues() {
                    if im.abs() > 1e-9 * (1.0 + re.abs()) {
                        return Err(Error::ComplexPoles { re, im });
                    }
                    etas.push(-re);
                }
                etas.sort_by(f64::total_cmp);
                Ok(etas)
            }
            JumpModel::BetaFamily(b) => Ok(b.poles(m)),
            JumpModel::CgmyTarget(_) => Err(Error::Unsupported(
                "the CGMY target has a branch cut, not poles; use a beta-family approximation".into(),
            )),
        }
    }

    fn check_pole(&self, s: f64) -> Result<()> {
        let near = |pole: f64| (s - pole).abs() < POLE_TOLERANCE * (1.0 + pole.abs());
        match &self.jumps {
            JumpModel::None | JumpModel::CgmyTarget(_) => Ok(()),
            JumpModel::Hyperexponential(h) => match h.rates.iter().find(|&&eta| near(-eta)) {
                Some(eta) => Err(Error::PoleEvaluation { s, pole: -eta }),
                None => Ok(()),
            },
            JumpModel::PhaseType(p) => {
                for (re, im) in p.eigenvalues() {
                    if im.abs() < 1e-9 && near(re) {
                        return Err(Error::PoleEvaluation { s, pole: re });
                    }
                }
                Ok(())
            }
            JumpModel::BetaFamily(b) => match b.nearest_pole(s) {
                Some(pole) if near(pole) => Err(Error::PoleEvaluation { s, pole }),
                _ => Ok(()),
            },
        }
    }

    /// `ψ(s)` for real `s`.
    pub fn laplace_exponent(&self, s: f64) -> Result<f64> {
        self.check_pole(s)?;
        self.psi_unchecked(s)
    }

    /// `ψ(s)` without the pole-proximity guard; used inside root brackets,
    /// which approach poles by construction.
    pub(crate) fn psi_unchecked(&self, s: f64) -> Result<f64> {
        let base = self.drift * s + 0.5 * self.sigma * self.sigma * s * s;
        let jump = match &self.jumps {
            JumpModel::None => 0.0,
            JumpModel::Hyperexponential(h) => {
                -h.lambda * h.weights.iter().zip(&h.rates).map(|(a, eta)| a * s / (eta + s)).sum::<f64>()
            }
            JumpModel::PhaseType(p) => {
                let (r, _) = p.resolvent_forms(s).ok_or(Error::PoleEvaluation { s, pole: s })?;
                p.lambda * (r - 1.0)
            }
            JumpModel::BetaFamily(b) => b.jump_part(s)?,
            JumpModel::CgmyTarget(_) => {
                return Err(Error::Unsupported(
                    "evaluate the CGMY target through a beta-family approximation".into(),
                ))
            }
        };
        Ok(base + jump)
    }

    /// `ψ(s)` for complex `s`; rational (phase-type family) models only.
    pub fn laplace_exponent_complex(&self, s: Complex64) -> Result<Complex64> {
        let base = s * self.drift + s * s * (0.5 * self.sigma * self.sigma);
        let jump = match &self.jumps {
            JumpModel::None => Complex64::new(0.0, 0.0),
            JumpModel::Hyperexponential(h) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, eta) in h.weights.iter().zip(&h.rates) {
                    let den = s + eta;
                    if den.norm() < POLE_TOLERANCE * (1.0 + eta) {
                        return Err(Error::PoleEvaluation { s: s.re, pole: -eta });
                    }
                    acc += s * *a / den;
                }
                -acc * h.lambda
            }
            JumpModel::PhaseType(p) => {
                let r = p.resolvent_complex(s).ok_or(Error::PoleEvaluation { s: s.re, pole: s.re })?;
                (r - 1.0) * p.lambda
            }
            _ => {
                return Err(Error::Unsupported(
                    "complex evaluation is implemented for rational exponents only".into(),
                ))
            }
        };
        Ok(base + jump)
    }

    /// `ψ'(s)` for real `s`.
    pub fn laplace_exponent_derivative(&self, s: f64) -> Result<f64> {
        self.check_pole(s)?;
        self.dpsi_unchecked(s)
    }

    pub(crate) fn dpsi_unchecked(&self, s: f64) -> Result<f64> {
        let base = self.drift + self.sigma * self.sigma * s;
        let jump = match &self.jumps {
            JumpModel::None => 0.0,
            JumpModel::Hyperexponential(h) => {
                -h.lambda
                    * h.weights.iter().zip(&h.rates).map(|(a, eta)| a * eta / ((eta + s) * (eta + s))).sum::<f64>()
            }
            JumpModel::PhaseType(p) => {
                let (_, r2) = p.resolvent_forms(s).ok_or(Error::PoleEvaluation { s, pole: s })?;
                -p.lambda * r2
            }
            JumpModel::BetaFamily(b) => b.jump_part_derivative(s)?,
            JumpModel::CgmyTarget(_) => {
                return Err(Error::Unsupported(
                    "evaluate the CGMY target through a beta-family approximation".into(),
                ))
            }
        };
        Ok(base + jump)
    }

    /// `ψ'(0+)`, the mean of `X₁`.
    pub fn mean(&self) -> Result<f64> {
        self.dpsi_unchecked(0.0)
    }

    /// Values of `W(0)`, `W'(0+)` and `θ` from the path-variation case.
    pub fn boundary_constants(&self, zeta: f64, q: f64) -> BoundaryConstants {
        if self.sigma > 0.0 {
            let v = 2.0 / (self.sigma * self.sigma);
            return BoundaryConstants { w0: 0.0, wprime0: v, theta: v };
        }
        match self.case_tag {
            CaseTag::UnboundedVariation => {
                BoundaryConstants { w0: 0.0, wprime0: f64::INFINITY, theta: f64::INFINITY }
            }
            CaseTag::BoundedVariation => {
                let mu = self.drift;
                let rate = self.jumps.total_rate();
                let wprime0 = (q + rate) / (mu * mu);
                BoundaryConstants { w0: 1.0 / mu, wprime0, theta: -zeta / mu + wprime0 }
            }
        }
    }

    /// Lévy density at `z < 0`.
    pub fn levy_density(&self, z: f64) -> Result<f64> {
        if !(z < 0.0) {
            return Err(Error::DomainError(format!("Lévy density is supported on z < 0, got {z}")));
        }
        Ok(match &self.jumps {
            JumpModel::None => 0.0,
            JumpModel::Hyperexponential(h) => {
                h.lambda * h.weights.iter().zip(&h.rates).map(|(a, eta)| a * eta * (eta * z).exp()).sum::<f64>()
            }
            JumpModel::PhaseType(p) => p.lambda * p.density(-z),
            JumpModel::BetaFamily(b) => b.density(z),
            JumpModel::CgmyTarget(t) => t.density(z),
        })
    }
}
