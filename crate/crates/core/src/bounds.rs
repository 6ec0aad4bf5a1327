//! Two-sided bounds on `W`, `Z` and `W'` for meromorphic models, built
//! from the first `m` roots and the truncation remainders `δ_m`, `ε_m`.

use serde::Serialize;

use crate::coeffs::FactorCoefficients;
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Term};
use crate::model::SpectralModel;
use crate::roots::RootSystem;
use crate::scale::{push_row, ScaleBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundWhich {
    WUpper,
    WLower,
    ZUpper,
    ZLower,
    WpLower,
    WpUpper,
    WpTilde,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationBounds {
    pub w_upper: ExpSum,
    pub w_lower: ExpSum,
    pub z_upper: ExpSum,
    pub z_lower: ExpSum,
    pub wp_lower: ExpSum,
    /// `ξ_1, …, ξ_m`.
    pub xis: Vec<f64>,
    /// `ξ_{m+1}`.
    pub xi_next: f64,
    pub m: usize,
    pub delta_m: f64,
    /// Infinite when `W'(0+) = ∞`; the `w̃` bound is then unavailable.
    pub epsilon_m: f64,
    pub zeta: f64,
    pub psi_prime_zeta: f64,
    pub q: f64,
    pub mean: f64,
}

/// Builds the bounds from a root system holding at least `m + 1` roots and
/// coefficients truncated at depth `m`.
pub fn build_scale_meromorphic(model: &SpectralModel, rootsys: &RootSystem, fc: &FactorCoefficients) -> Result<TruncationBounds> {
    let m = fc.m;
    if rootsys.finite {
        return Err(Error::InvalidArgument("truncation bounds are for meromorphic models".into()));
    }
    if m == 0 || rootsys.xis.len() < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "bounds at depth {m} need {} roots, have {}",
            m + 1,
            rootsys.xis.len()
        )));
    }
    let zeta = rootsys.zeta;
    let q = fc.q;
    let delta = fc.delta_m;
    let xi_next = rootsys.xis[m];
    let xis = rootsys.xis[..m].to_vec();

    let mut upper = vec![Term::new(1.0 / fc.psi_prime_zeta, zeta, 0)];
    upper.extend(fc.c.iter().zip(&xis).map(|(c, xi)| Term::new(-c, -xi, 0)));
    let w_upper = ExpSum::new(upper);
    // gap δ_m (1 + e^{-ξ_{m+1} x})
    let w_lower = w_upper.add(&ExpSum::new([Term::new(-delta, 0.0, 0), Term::new(-delta, -xi_next, 0)]));
    let z_upper = ExpSum::constant(1.0).add(&w_upper.integral().scale(q));
    let z_lower = ExpSum::constant(1.0).add(&w_lower.integral().scale(q));
    let wp_lower = w_upper.derivative();

    Ok(TruncationBounds {
        w_upper,
        w_lower,
        z_upper,
        z_lower,
        wp_lower,
        xis,
        xi_next,
        m,
        delta_m: delta,
        epsilon_m: fc.epsilon_m,
        zeta,
        psi_prime_zeta: fc.psi_prime_zeta,
        q,
        mean: model.mean()?,
    })
}

impl TruncationBounds {
    /// `W`-type bounds vanish and `Z`-type bounds equal 1 on `x < 0`.
    /// `WpTilde` is NaN when `ε_m` is infinite.
    pub fn eval(&self, which: BoundWhich, x: f64) -> f64 {
        if x < 0.0 {
            return match which {
                BoundWhich::ZUpper | BoundWhich::ZLower => 1.0,
                _ => 0.0,
            };
        }
        match which {
            BoundWhich::WUpper => self.w_upper.eval(x),
            BoundWhich::WLower => self.w_lower.eval(x),
            BoundWhich::ZUpper => self.z_upper.eval(x),
            BoundWhich::ZLower => self.z_lower.eval(x),
            BoundWhich::WpLower => self.wp_lower.eval(x),
            BoundWhich::WpUpper => self.wp_upper(x),
            BoundWhich::WpTilde => self.wp_tilde(x).unwrap_or(f64::NAN),
        }
    }

    fn head_max(&self, x: f64) -> f64 {
        self.xis.iter().map(|xi| xi * (-xi * x).exp()).fold(0.0, f64::max)
    }

    /// `sup_{λ ≥ ξ_{m+1}} λ e^{-λ x}`.
    fn tail_max(&self, x: f64) -> f64 {
        if x == 0.0 {
            f64::INFINITY
        } else if self.xi_next <= 1.0 / x {
            1.0 / (std::f64::consts::E * x)
        } else {
            self.xi_next * (-self.xi_next * x).exp()
        }
    }

    /// `w̄(x) = w̲(x) + [max_{k≤m} ξ_k e^{-ξ_k x} + sup_{λ≥ξ_{m+1}} λe^{-λx}] δ_m`.
    pub fn wp_upper(&self, x: f64) -> f64 {
        self.wp_lower.eval(x) + (self.head_max(x) + self.tail_max(x)) * self.delta_m
    }

    /// `w̃(x) = w̲(x) + max_{k≤m}(ξ_k e^{-ξ_k x}) δ_m + e^{-ξ_{m+1} x} ε_m`.
    pub fn wp_tilde(&self, x: f64) -> Option<f64> {
        self.epsilon_m.is_finite().then(|| {
            self.wp_lower.eval(x) + self.head_max(x) * self.delta_m + (-self.xi_next * x).exp() * self.epsilon_m
        })
    }

    /// The tighter of `w̄` and `w̃`.
    pub fn wp_best_upper(&self, x: f64) -> f64 {
        match self.wp_tilde(x) {
            Some(t) => t.min(self.wp_upper(x)),
            None => self.wp_upper(x),
        }
    }

    /// Scale bundle built on the upper approximant `W̄`, which converges to
    /// `W` as `m` grows.
    pub fn approximant(&self) -> ScaleBundle {
        ScaleBundle::from_w(self.w_upper.clone(), self.zeta, self.psi_prime_zeta, self.q, self.mean)
    }

    /// Scale bundle built on `(W̄ + W̲)/2`.
    pub fn midpoint(&self) -> ScaleBundle {
        let w = self.w_upper.add(&self.w_lower).scale(0.5);
        ScaleBundle::from_w(w, self.zeta, self.psi_prime_zeta, self.q, self.mean)
    }

    /// Header `x,W_lower,W_upper,Z_lower,Z_upper,w_lower,w_upper,w_tilde`.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        let mut out = String::from("x,W_lower,W_upper,Z_lower,Z_upper,w_lower,w_upper,w_tilde\n");
        for &x in grid {
            let row = [
                x,
                self.eval(BoundWhich::WLower, x),
                self.eval(BoundWhich::WUpper, x),
                self.eval(BoundWhich::ZLower, x),
                self.eval(BoundWhich::ZUpper, x),
                self.eval(BoundWhich::WpLower, x),
                self.eval(BoundWhich::WpUpper, x),
                self.eval(BoundWhich::WpTilde, x),
            ];
            push_row(&mut out, &row);
        }
        out
    }
}

/// Roots, coefficients and bounds at depth `m` in one call.
pub fn meromorphic_bounds(model: &SpectralModel, q: f64, m: usize, tol: f64) -> Result<TruncationBounds> {
    let rs = crate::roots::root_system(model, q, m, tol)?;
    let fc = crate::coeffs::factor(model, &rs, m)?;
    build_scale_meromorphic(model, &rs, &fc)
}
