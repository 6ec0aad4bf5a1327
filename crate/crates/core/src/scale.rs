//! Scale functions `W`, `Z = 1 + q∫W` and their derivatives for models
//! with finitely many Cramér–Lundberg roots.
//!
//! With distinct roots the scale function is an exponential sum,
//! `W(x) = (θ/ϱ_q) Σ A_k ξ_k/(ζ_q + ξ_k) [e^{ζ_q x} - e^{-ξ_k x}] + W(0) e^{ζ_q x}`,
//! and everything else follows by exact calculus on [`ExpSum`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::coeffs::FactorCoefficients;
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Term};
use crate::model::SpectralModel;
use crate::roots::RootSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    W,
    Wp,
    Wpp,
    Z,
    IntZ,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleBundle {
    pub w: ExpSum,
    pub wp: ExpSum,
    pub wpp: ExpSum,
    pub z: ExpSum,
    pub int_z: ExpSum,
    pub zeta: f64,
    pub psi_prime_zeta: f64,
    pub q: f64,
    /// `ψ'(0+)`, needed by the bail-out and terminal-value formulas.
    pub mean: f64,
}

impl ScaleBundle {
    /// Completes a bundle from `W` alone.
    pub fn from_w(w: ExpSum, zeta: f64, psi_prime_zeta: f64, q: f64, mean: f64) -> Self {
        let wp = w.derivative();
        let wpp = wp.derivative();
        let z = ExpSum::constant(1.0).add(&w.integral().scale(q));
        let int_z = z.integral();
        ScaleBundle { w, wp, wpp, z, int_z, zeta, psi_prime_zeta, q, mean }
    }

    /// `W`, `W'`, `W''` vanish and `Z = 1` on `x < 0`; there `∫₀^x Z = x`.
    pub fn eval(&self, which: Which, x: f64) -> f64 {
        if x < 0.0 {
            return match which {
                Which::W | Which::Wp | Which::Wpp => 0.0,
                Which::Z => 1.0,
                Which::IntZ => x,
            };
        }
        self.get(which).eval(x)
    }

    pub fn get(&self, which: Which) -> &ExpSum {
        match which {
            Which::W => &self.w,
            Which::Wp => &self.wp,
            Which::Wpp => &self.wpp,
            Which::Z => &self.z,
            Which::IntZ => &self.int_z,
        }
    }

    /// `W_ζ(x) = e^{-ζ_q x} W(x)`.
    pub fn w_zeta_version(&self) -> ExpSum {
        self.w.shift_rate(-self.zeta)
    }

    /// Multiplies `W` by `c > 0` and rebuilds the bundle.
    pub fn rescaled(&self, c: f64) -> Self {
        Self::from_w(self.w.scale(c), self.zeta, self.psi_prime_zeta, self.q, self.mean)
    }

    /// Header `x,W,Wp,Wpp,Z`, one row per grid point, 12 significant digits.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        let mut out = String::from("x,W,Wp,Wpp,Z\n");
        for &x in grid {
            let row = [x, self.eval(Which::W, x), self.eval(Which::Wp, x), self.eval(Which::Wpp, x), self.eval(Which::Z, x)];
            push_row(&mut out, &row);
        }
        out
    }
}

/// Formats a CSV row with 12 significant digits.
pub fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", fmt_sig(*v));
    }
    out.push('\n');
}

pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

/// `x_min, x_min + step, …` up to `x_max` (inclusive within rounding).
pub fn grid(x_min: f64, x_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(x_max >= x_min) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!("bad grid {x_min}:{x_max}:{step}")));
    }
    let n = ((x_max - x_min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| x_min + i as f64 * step).collect())
}

/// Scale bundle for a rational model with distinct roots.
pub fn build_scale_finite(model: &SpectralModel, rootsys: &RootSystem, fc: &FactorCoefficients) -> Result<ScaleBundle> {
    if !rootsys.finite {
        return Err(Error::InvalidArgument("exact scale functions need finitely many roots".into()));
    }
    let zeta = rootsys.zeta;
    let factor = fc.theta / fc.varrho;
    let mut terms = Vec::with_capacity(fc.a.len() + 1);
    let mut lead = fc.w0;
    for (a, xi) in fc.a.iter().zip(&rootsys.xis) {
        let c = factor * a * xi / (zeta + xi);
        lead += c;
        terms.push(Term::new(-c, -xi, 0));
    }
    terms.push(Term::new(lead, zeta, 0));
    Ok(ScaleBundle::from_w(ExpSum::new(terms), zeta, fc.psi_prime_zeta, fc.q, model.mean()?))
}

/// Worst relative error between the exact transform of `W` and
/// `1/(ψ(s) - q)` over `s_grid`; every `s` must exceed `ζ_q`.
pub fn laplace_check(bundle: &ScaleBundle, model: &SpectralModel, s_grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in s_grid {
        if !(s > bundle.zeta) {
            return Err(Error::InvalidArgument(format!("transform point {s} is not beyond ζ = {}", bundle.zeta)));
        }
        let want = 1.0 / (model.laplace_exponent(s)? - bundle.q);
        let got = bundle.w.laplace_transform(s);
        worst = worst.max(((got - want) / want).abs());
    }
    Ok(worst)
}
