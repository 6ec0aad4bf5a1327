#![allow(dead_code)]

use levy_scale::SpectralModel;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub const TABLE_DRIFT: f64 = 0.1;
pub const TABLE_Q: f64 = 0.03;
pub const TABLE_SIGMAS: [f64; 3] = [0.0, 0.2, 0.4];

pub fn table_model(sigma: f64) -> SpectralModel {
    levy_scale::weibull_model(sigma, TABLE_DRIFT).unwrap()
}

/// Single exponential jumps with `μ = λ = η = 1`.
pub fn toy() -> SpectralModel {
    SpectralModel::hyperexponential(0.0, 1.0, 1.0, &[1.0], &[1.0]).unwrap()
}

/// Beta-family model with `σ = 0.2`, `μ̂ = 0.1`, `λ = 1.5`, `α = 3`,
/// `β = 1`, `c = 0.1`.
pub fn beta_model() -> SpectralModel {
    SpectralModel::beta_family(0.2, 0.1, 0.1, 3.0, 1.0, 1.5).unwrap()
}

pub const BETA_Q: f64 = 0.03;

pub struct Sampled {
    pub model: SpectralModel,
    pub q: f64,
}

/// Seed-fixed family of valid hyperexponential models; half of them have
/// no Gaussian part.
pub fn sample_models(n: usize, seed: u64) -> Vec<Sampled> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let phases = rng.random_range(1..=4usize);
            let mut rates = Vec::with_capacity(phases);
            let mut r = rng.random_range(0.2..1.0);
            for _ in 0..phases {
                rates.push(r);
                r *= rng.random_range(1.5..4.0);
            }
            let raw: Vec<f64> = (0..phases).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let lambda = rng.random_range(0.2..3.0);
            let q = rng.random_range(0.01..0.5);
            let (sigma, drift) = if i % 2 == 0 {
                (0.0, rng.random_range(0.05..2.0))
            } else {
                (rng.random_range(0.2..0.8), rng.random_range(-0.5..1.0))
            };
            let model = SpectralModel::hyperexponential(sigma, drift, lambda, &weights, &rates).unwrap();
            Sampled { model, q }
        })
        .collect()
}
