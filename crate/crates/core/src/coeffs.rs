//! Partial-fraction weights of the Wiener–Hopf factor
//! `φ⁻_q(s) = Π(s + η_j)/η_j · Π ξ_i/(s + ξ_i)` and the scalars built
//! from them.
//!
//! With distinct roots, `A_k = Π_j (1 - ξ_k/η_j) / Π_{i≠k} (1 - ξ_k/ξ_i)`.
//! For meromorphic models the products are truncated to the first `m`
//! roots and poles, giving `A^{(m)}_k ↑ A_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SpectralModel;
use crate::roots::RootSystem;

/// Products longer than this are accumulated in log-space.
const LOG_SPACE_THRESHOLD: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorCoefficients {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    /// `ϱ_q = Σ A_k ξ_k` (truncated for meromorphic models).
    pub varrho: f64,
    pub theta: f64,
    /// `κ_q = 1/ψ'(ζ_q) - W(0)`.
    pub kappa: f64,
    /// `κ_q - Σ C^{(m)}`; zero up to rounding for rational models.
    pub delta_m: f64,
    /// `θ - (ζ_q/q) Σ ξ_k A^{(m)}_k`; infinite when `θ` is.
    pub epsilon_m: f64,
    pub m: usize,
    pub q: f64,
    pub zeta: f64,
    pub psi_prime_zeta: f64,
    pub w0: f64,
    /// `lim_{s→∞} φ⁻_q(s)`: the mass of `-X̲` at zero.
    pub atom: f64,
}

/// Truncation depth actually used for a root system.
pub fn effective_depth(rootsys: &RootSystem, m: usize) -> usize {
    if rootsys.finite {
        rootsys.xis.len()
    } else {
        m.min(rootsys.xis.len()).min(rootsys.etas.len())
    }
}

/// Residue weights `A_k`, or `A^{(m)}_k` for meromorphic root systems.
pub fn compute_a(rootsys: &RootSystem, m: usize) -> Result<Vec<f64>> {
    let (xis, etas) = if rootsys.finite {
        (&rootsys.xis[..], &rootsys.etas[..])
    } else {
        if m == 0 || rootsys.xis.len() < m || rootsys.etas.len() < m {
            return Err(Error::InvalidArgument(format!(
                "truncation depth {m} exceeds the {} computed roots",
                rootsys.xis.len()
            )));
        }
        (&rootsys.xis[..m], &rootsys.etas[..m])
    };
    let log_space = xis.len() + etas.len() > LOG_SPACE_THRESHOLD;
    xis.iter()
        .enumerate()
        .map(|(k, &xk)| {
            let mut factors = Vec::with_capacity(xis.len() + etas.len());
            for &eta in etas {
                factors.push((1.0 - xk / eta, false));
            }
            for (i, &xi) in xis.iter().enumerate() {
                if i == k {
                    continue;
                }
                let d = 1.0 - xk / xi;
                if d.abs() < 1e-14 {
                    return Err(Error::DivisionNearZero { xi_k: xk, xi_i: xi });
                }
                factors.push((d, true));
            }
            Ok(if log_space { log_product(&factors) } else { direct_product(&factors) })
        })
        .collect()
}

fn direct_product(factors: &[(f64, bool)]) -> f64 {
    factors.iter().fold(1.0, |acc, &(f, inv)| if inv { acc / f } else { acc * f })
}

fn log_product(factors: &[(f64, bool)]) -> f64 {
    let mut log = 0.0;
    let mut sign = 1.0;
    for &(f, inv) in factors {
        sign *= f.signum();
        if inv {
            log -= f.abs().ln();
        } else {
            log += f.abs().ln();
        }
    }
    sign * log.exp()
}

/// `ϱ_q`, `C_k`, `κ_q`, `δ_m`, `ε_m` from the weights. `κ_q` always comes
/// from `ψ'(ζ_q)`, so `δ_m` is a genuine remainder.
pub fn compute_scalars(model: &SpectralModel, rootsys: &RootSystem, a: &[f64], q: f64) -> Result<FactorCoefficients> {
    let zeta = rootsys.zeta;
    let xis = &rootsys.xis[..a.len()];
    let psi_prime_zeta = model.laplace_exponent_derivative(zeta)?;
    let bc = model.boundary_constants(zeta, q);
    let varrho: f64 = a.iter().zip(xis).map(|(a, x)| a * x).sum();
    let c: Vec<f64> = a.iter().zip(xis).map(|(a, x)| zeta / q * x * a / (zeta + x)).collect();
    let kappa = 1.0 / psi_prime_zeta - bc.w0;
    let delta_m = kappa - c.iter().sum::<f64>();
    let epsilon_m = if bc.theta.is_finite() { bc.theta - zeta / q * varrho } else { f64::INFINITY };
    let atom = if rootsys.finite && rootsys.xis.len() == rootsys.etas.len() {
        rootsys.xis.iter().zip(&rootsys.etas).map(|(x, e)| x / e).product()
    } else {
        0.0
    };
    Ok(FactorCoefficients {
        a: a.to_vec(),
        c,
        varrho,
        theta: bc.theta,
        kappa,
        delta_m,
        epsilon_m,
        m: a.len(),
        q,
        zeta,
        psi_prime_zeta,
        w0: bc.w0,
        atom,
    })
}

/// Roots, weights and scalars in one call.
pub fn factor(model: &SpectralModel, rootsys: &RootSystem, m: usize) -> Result<FactorCoefficients> {
    let a = compute_a(rootsys, effective_depth(rootsys, m))?;
    compute_scalars(model, rootsys, &a, rootsys.q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityDiagnostics {
    /// `|ζ_q/q - θ/ϱ_q| / (ζ_q/q)`; `None` when `θ` is infinite.
    pub zeta_identity: Option<f64>,
    /// `θq/ζ_q - ϱ^{(m)}`, which equals `ε_m q/ζ_q`.
    pub truncated_gap: Option<f64>,
    /// `|Σ A_k + atom - 1|`; meaningful for rational models.
    pub mass_residual: f64,
    /// `|κ_q - Σ C_k| / κ_q`; the truncation remainder for meromorphic models.
    pub kappa_residual: f64,
}

impl IdentityDiagnostics {
    /// Worst residual that must vanish for an exact (rational) model.
    pub fn worst_exact(&self) -> f64 {
        [self.zeta_identity.unwrap_or(0.0), self.mass_residual, self.kappa_residual]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn check_identities(fc: &FactorCoefficients) -> IdentityDiagnostics {
    let ratio = fc.zeta / fc.q;
    let finite_theta = fc.theta.is_finite();
    IdentityDiagnostics {
        zeta_identity: finite_theta.then(|| (ratio - fc.theta / fc.varrho).abs() / ratio),
        truncated_gap: finite_theta.then(|| fc.theta / ratio - fc.varrho),
        mass_residual: (fc.a.iter().sum::<f64>() + fc.atom - 1.0).abs(),
        kappa_residual: (fc.kappa - fc.c.iter().sum::<f64>()).abs() / fc.kappa.abs().max(f64::MIN_POSITIVE),
    }
}

/// `(ζ_q/q) Σ_{k≤j} ξ_k A^{(j)}_k` for each requested depth `j`. For
/// `σ = 0` with infinite activity these grow without bound.
pub fn partial_sums(rootsys: &RootSystem, depths: &[usize]) -> Result<Vec<f64>> {
    let ratio = rootsys.zeta / rootsys.q;
    depths
        .iter()
        .map(|&j| {
            let a = compute_a(rootsys, j)?;
            Ok(ratio * a.iter().zip(&rootsys.xis).map(|(a, x)| a * x).sum::<f64>())
        })
        .collect()
}

/// `φ⁻_q(s)` from its product form.
pub fn wiener_hopf_factor(rootsys: &RootSystem, m: usize, s: f64) -> f64 {
    let depth = effective_depth(rootsys, m);
    let etas = if rootsys.finite { &rootsys.etas[..] } else { &rootsys.etas[..depth] };
    let num: f64 = etas.iter().map(|e| (s + e) / e).product();
    let den: f64 = rootsys.xis[..depth].iter().map(|x| x / (s + x)).product();
    num * den
}

/// `φ⁻_q(s)` from the partial-fraction expansion `atom + Σ A_k ξ_k/(s + ξ_k)`.
pub fn wiener_hopf_partial_fractions(fc: &FactorCoefficients, rootsys: &RootSystem, s: f64) -> f64 {
    fc.atom + fc.a.iter().zip(&rootsys.xis).map(|(a, x)| a * x / (s + x)).sum::<f64>()
}
