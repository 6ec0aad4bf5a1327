//! Scale functions of spectrally negative Lévy processes whose jumps are
//! hyperexponential, phase-type or of beta-family type, and the optimal
//! dividend strategies that are written in terms of them.

pub mod bounds;
pub mod coeffs;
pub mod error;
pub mod expsum;
pub mod model;
pub mod roots;
pub mod scale;
pub mod solvers;
pub mod special;

pub use bounds::{build_scale_meromorphic, meromorphic_bounds, BoundWhich, TruncationBounds};
pub use coeffs::FactorCoefficients;
pub use error::{Error, Result};
pub use expsum::{ExpSum, Term};
pub use model::{BetaFamily, CaseTag, CgmyTarget, Hyperexponential, JumpModel, PhaseType, SpectralModel};
pub use roots::RootSystem;
pub use scale::{build_scale_finite, ScaleBundle, Which};
pub use solvers::{PolicyKind, PolicyResult, SolverOptions, ValueFunction};

/// Roots, coefficients and the exact scale bundle of a rational model.
pub fn finite_scale(model: &SpectralModel, q: f64, tol: f64) -> Result<(RootSystem, FactorCoefficients, ScaleBundle)> {
    let rs = roots::root_system(model, q, 0, tol)?;
    let fc = coeffs::factor(model, &rs, 0)?;
    let bundle = build_scale_finite(model, &rs, &fc)?;
    Ok((rs, fc, bundle))
}

/// The six-phase hyperexponential fit of a Weibull jump distribution used
/// in the bundled experiments, as `(weights, rates)` sorted by rate.
pub fn weibull_fit() -> (Vec<f64>, Vec<f64>) {
    #[derive(serde::Deserialize)]
    struct Fixture {
        weights: Vec<f64>,
        rates: Vec<f64>,
    }
    let f: Fixture = serde_json::from_str(include_str!("../fixtures/weibull_hyperexp.json")).expect("bundled fixture parses");
    let h = Hyperexponential::sorted(1.0, &f.weights, &f.rates);
    (h.weights, h.rates)
}

/// Spectrally negative model with Weibull-fitted jumps at unit jump rate.
pub fn weibull_model(sigma: f64, drift: f64) -> Result<SpectralModel> {
    let (w, r) = weibull_fit();
    SpectralModel::hyperexponential(sigma, drift, 1.0, &w, &r)
}
