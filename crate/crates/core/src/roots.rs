//! Roots of the Cramér–Lundberg equation `ψ(s) = q`.
//!
//! The positive root `ζ_q` is bracketed by doubling. The negative roots
//! `-ξ_k` interlace with the poles `-η_k`,
//! `0 < ξ₁ < η₁ < ξ₂ < η₂ < …`, so every `ξ_k` is isolated by bisection on
//! `(η_{k-1}, η_k)` with `η₀ = 0`. With a Gaussian part and finitely many
//! poles there is one more root beyond the last pole.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SpectralModel;

/// Bracket-width bound on every root (absolute).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default truncation depth for meromorphic models.
pub const DEFAULT_DEPTH: usize = 150;

/// Relative gap under which two roots are treated as one repeated root.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

const OVERFLOW_GUARD: f64 = 1e12;
const ENDPOINT_OFFSET: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSystem {
    pub q: f64,
    pub zeta: f64,
    pub xis: Vec<f64>,
    pub etas: Vec<f64>,
    /// `|ψ(-ξ_k) - q|` at each returned root.
    pub residuals: Vec<f64>,
    /// Final bisection bracket width for each `ξ_k`.
    pub widths: Vec<f64>,
    pub zeta_residual: f64,
    pub count_relation_ok: bool,
    /// Whether the pole set is finite (phase-type family).
    pub finite: bool,
}

impl RootSystem {
    /// The merge-sorted sequence alternates `ξ, η, ξ, η, …`.
    pub fn interlaced(&self) -> bool {
        let mut prev = 0.0;
        for k in 0..self.xis.len() {
            if !(self.xis[k] > prev) {
                return false;
            }
            prev = self.xis[k];
            if let Some(&eta) = self.etas.get(k) {
                if !(eta > prev) {
                    return false;
                }
                prev = eta;
            }
        }
        self.etas.len() <= self.xis.len()
    }
}

/// Bisection to machine resolution on a bracket with a sign change.
/// Returns `(root, final width)`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, what: &str) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok((lo, 0.0));
    }
    if fhi == 0.0 {
        return Ok((hi, 0.0));
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::BracketFailure { what: what.to_string(), lo, hi });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

/// `ζ_q = sup{s ≥ 0 : ψ(s) = q}`.
pub fn solve_positive_root(model: &SpectralModel, q: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    let f = |s: f64| model.psi_unchecked(s).map(|v| v - q);
    let mut hi = 1.0;
    while f(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > OVERFLOW_GUARD {
            return Err(Error::BracketFailure { what: "positive root".into(), lo: 0.0, hi });
        }
    }
    let (z, width) = bisect(f, 0.0, hi, "positive root")?;
    if width > tol.max(f64::EPSILON * z) {
        return Err(Error::BracketFailure { what: "positive root (tolerance)".into(), lo: z, hi: z + width });
    }
    Ok(z)
}

/// Pole magnitudes `η₁ < η₂ < …`: all of them for rational exponents,
/// the first `m` for meromorphic ones.
pub fn enumerate_poles(model: &SpectralModel, m: usize) -> Result<Vec<f64>> {
    if m == 0 && !model.is_finite() {
        return Err(Error::InvalidArgument("pole count must be at least 1".into()));
    }
    let etas = model.poles(m)?;
    for w in etas.windows(2) {
        if !(w[1] > w[0] * (1.0 + MULTIPLICITY_TOL)) {
            return Err(Error::MultiplicityDetected { a: w[0], b: w[1] });
        }
    }
    Ok(etas)
}

/// Negative-root magnitudes `ξ₁ < ξ₂ < …`. For rational exponents `m` is
/// ignored and every root is returned; for meromorphic ones the first `m`.
pub fn solve_negative_roots(model: &SpectralModel, q: f64, m: usize, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_q(q)?;
    let finite = model.is_finite();
    let etas = if finite { enumerate_poles(model, 0)? } else { enumerate_poles(model, m)? };
    let f = |x: f64| model.psi_unchecked(-x).map(|v| v - q);
    let mut xis = Vec::with_capacity(etas.len() + 1);
    let mut widths = Vec::with_capacity(etas.len() + 1);
    let mut left = 0.0;
    for (k, &eta) in etas.iter().enumerate() {
        let lo = if k == 0 { 0.0 } else { left * (1.0 + ENDPOINT_OFFSET) };
        let hi = eta * (1.0 - ENDPOINT_OFFSET);
        let (x, w) = bisect(f, lo, hi, &format!("negative root {}", k + 1))?;
        xis.push(x);
        widths.push(w);
        left = eta;
    }
    if finite && model.sigma() > 0.0 {
        // ψ(-s) → +∞ as s → ∞ once σ > 0
        let lo = if etas.is_empty() { 0.0 } else { left * (1.0 + ENDPOINT_OFFSET) };
        let mut width = 1.0;
        let mut hi = lo + width;
        while f(hi)? <= 0.0 {
            width *= 2.0;
            hi = lo + width;
            if hi > OVERFLOW_GUARD {
                return Err(Error::BracketFailure { what: "last negative root".into(), lo, hi });
            }
        }
        let (x, w) = bisect(f, lo, hi, "last negative root")?;
        xis.push(x);
        widths.push(w);
    }
    for (k, w) in widths.iter().enumerate() {
        if *w > tol.max(4.0 * f64::EPSILON * xis[k]) {
            return Err(Error::BracketFailure {
                what: format!("negative root {} (tolerance)", k + 1),
                lo: xis[k],
                hi: xis[k] + w,
            });
        }
    }
    for pair in xis.windows(2) {
        if (pair[1] - pair[0]).abs() <= MULTIPLICITY_TOL * pair[1].abs() {
            return Err(Error::MultiplicityDetected { a: pair[0], b: pair[1] });
        }
    }
    Ok((xis, widths))
}

/// Full root system. For meromorphic models `m` roots and `m + 1` are
/// computed (the extra root `ξ_{m+1}` enters the truncation bounds).
pub fn root_system(model: &SpectralModel, q: f64, m: usize, tol: f64) -> Result<RootSystem> {
    let zeta = solve_positive_root(model, q, tol)?;
    let finite = model.is_finite();
    let depth = if finite { 0 } else { m.max(1) + 1 };
    let etas = enumerate_poles(model, depth)?;
    let (xis, widths) = solve_negative_roots(model, q, depth, tol)?;
    let residuals = xis
        .iter()
        .map(|x| model.psi_unchecked(-x).map(|v| (v - q).abs()))
        .collect::<Result<Vec<_>>>()?;
    let zeta_residual = (model.psi_unchecked(zeta)? - q).abs();
    let count_relation_ok = if !finite {
        xis.len() == etas.len()
    } else if model.sigma() > 0.0 {
        xis.len() == etas.len() + 1
    } else {
        xis.len() == etas.len()
    };
    Ok(RootSystem { q, zeta, xis, etas, residuals, widths, zeta_residual, count_relation_ok, finite })
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("discount rate must be positive, got {q}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn toy() -> SpectralModel {
        SpectralModel::hyperexponential(0.0, 1.0, 1.0, &[1.0], &[1.0]).unwrap()
    }

    #[test]
    fn brownian_roots() {
        let m = SpectralModel::brownian(1.0, 0.0).unwrap();
        let z = solve_positive_root(&m, 0.5, DEFAULT_TOL).unwrap();
        assert!((z - 1.0).abs() < 1e-12);
        let (xis, _) = solve_negative_roots(&m, 0.5, 0, DEFAULT_TOL).unwrap();
        assert_eq!(xis.len(), 1);
        assert!((xis[0] - 1.0).abs() < 1e-12);
        let rs = root_system(&m, 0.5, 0, DEFAULT_TOL).unwrap();
        assert!(rs.count_relation_ok && rs.interlaced());
    }

    #[test]
    fn toy_roots_are_golden_ratio_pair() {
        // μs(η+s) - λs = q(η+s) ⇒ s² - s - 1 = 0 for μ = λ = η = q = 1
        let m = toy();
        let z = solve_positive_root(&m, 1.0, DEFAULT_TOL).unwrap();
        assert!((z - GOLDEN).abs() < 1e-12);
        let rs = root_system(&m, 1.0, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rs.xis.len(), 1);
        assert!((rs.xis[0] - (GOLDEN - 1.0)).abs() < 1e-12);
        assert!(rs.interlaced() && rs.count_relation_ok);
        assert!(rs.residuals[0] < 1e-12 && rs.zeta_residual < 1e-12);
    }

    #[test]
    fn beta_family_brackets_follow_pole_formula() {
        let m = SpectralModel::beta_family(0.2, 0.1, 0.1, 3.0, 1.0, 1.5).unwrap();
        assert_eq!(enumerate_poles(&m, 3).unwrap(), vec![3.0, 4.0, 5.0]);
        let half = SpectralModel::beta_family(0.2, 0.1, 0.1, 3.0, 0.5, 1.5).unwrap();
        assert_eq!(enumerate_poles(&half, 2).unwrap(), vec![1.5, 2.0]);
        let rs = root_system(&m, 0.03, 10, DEFAULT_TOL).unwrap();
        assert_eq!(rs.xis.len(), 11);
        assert!(rs.interlaced());
        assert!(rs.xis[0] > 0.0 && rs.xis[0] < 3.0);
        for k in 1..rs.xis.len() {
            assert!(rs.xis[k] > (k + 2) as f64 && rs.xis[k] < (k + 3) as f64);
        }
        assert!((m.laplace_exponent(rs.zeta).unwrap() - 0.03).abs() <= 1e-10);
    }

    #[test]
    fn hyperexponential_root_counts() {
        let with_gauss = SpectralModel::hyperexponential(0.3, 0.2, 1.0, &[0.3, 0.7], &[1.0, 4.0]).unwrap();
        let rs = root_system(&with_gauss, 0.1, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rs.xis.len(), 3);
        assert!(rs.interlaced() && rs.count_relation_ok);
        let pure_jump = SpectralModel::hyperexponential(0.0, 0.2, 1.0, &[0.3, 0.7], &[1.0, 4.0]).unwrap();
        let rs = root_system(&pure_jump, 0.1, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rs.xis.len(), 2);
        assert!(rs.interlaced() && rs.count_relation_ok);
    }

    #[test]
    fn roots_increase_with_q() {
        let m = SpectralModel::hyperexponential(0.3, 0.2, 1.0, &[0.3, 0.7], &[1.0, 4.0]).unwrap();
        let a = root_system(&m, 0.1, 0, DEFAULT_TOL).unwrap();
        let b = root_system(&m, 0.2, 0, DEFAULT_TOL).unwrap();
        assert!(b.zeta > a.zeta);
        assert!(a.xis.iter().zip(&b.xis).all(|(x, y)| y > x));
    }

    #[test]
    fn non_positive_q_rejected() {
        assert!(solve_positive_root(&toy(), 0.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn bisect_reports_missing_sign_change() {
        let r = bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, "test");
        assert!(matches!(r, Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn complex_generator_rejected() {
        use crate::model::{JumpModel, PhaseType};
        let p = PhaseType {
            lambda: 1.0,
            alpha: vec![1.0, 0.0],
            generator: vec![vec![-1.0, 0.9], vec![0.0, -1.0]],
        };
        // upper triangular, so the eigenvalue -1 is repeated
        let m = SpectralModel::new(0.2, 0.1, JumpModel::PhaseType(p)).unwrap();
        assert!(matches!(enumerate_poles(&m, 0), Err(Error::MultiplicityDetected { .. })));
        let cyc = PhaseType {
            lambda: 1.0,
            alpha: vec![1.0, 0.0, 0.0],
            generator: vec![vec![-2.0, 1.9, 0.0], vec![0.0, -2.0, 1.9], vec![1.9, 0.0, -2.0]],
        };
        let m = SpectralModel::new(0.2, 0.1, JumpModel::PhaseType(cyc)).unwrap();
        assert!(matches!(enumerate_poles(&m, 0), Err(Error::ComplexPoles { .. })));
    }
}
