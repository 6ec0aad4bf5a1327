//! Gamma-family helpers for the beta-family Laplace exponent.
//!
//! `B(x, y)` is needed at negative, non-integer arguments (the second
//! argument is `1 - λ`, which is negative for `λ > 1`), so everything goes
//! through `ln|Γ|` with the sign carried separately.

use crate::error::{Error, Result};

/// `(ln|Γ(x)|, sign Γ(x))`. `x` must not be a non-positive integer.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

/// `(ln|B(x, y)|, sign B(x, y))` with `B(x, y) = Γ(x)Γ(y)/Γ(x + y)`.
pub fn ln_beta_signed(x: f64, y: f64) -> (f64, f64) {
    let (a, sa) = ln_gamma_signed(x);
    let (b, sb) = ln_gamma_signed(y);
    let (c, sc) = ln_gamma_signed(x + y);
    (a + b - c, sa * sb * sc)
}

/// The beta function. Errors when the result is not finite.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    let (l, s) = ln_beta_signed(x, y);
    let v = s * l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSpecialFunction { what: "beta", at: x })
    }
}

pub fn digamma(x: f64) -> f64 {
    statrs::function::gamma::digamma(x)
}
