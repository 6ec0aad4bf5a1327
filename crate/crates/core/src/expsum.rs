//! Functions of the form `Σ w · x^p · e^{r x}` on `x ≥ 0`.
//!
//! Closed under differentiation, definite integration from 0 and
//! multiplication by `e^{c x}`, and its Laplace transform is exact. Every
//! scale function produced by this crate is carried as an [`ExpSum`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Relative weight below which a non-growing term is dropped. Growing
/// terms are always kept: a tiny weight can still dominate at large `x`.
pub const PRUNE_RATIO: f64 = 1e-16;

/// Terms whose exponent exceeds this are reported as overflowing.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub rate: f64,
    pub power: u32,
}

impl Term {
    pub fn new(weight: f64, rate: f64, power: u32) -> Self {
        Term { weight, rate, power }
    }

    fn eval(&self, x: f64) -> f64 {
        if self.weight == 0.0 {
            return 0.0;
        }
        if self.power > 0 && x == 0.0 {
            return 0.0;
        }
        let mut log = self.weight.abs().ln() + self.rate * x;
        if self.power > 0 {
            log += self.power as f64 * x.ln();
        }
        if log > MAX_EXPONENT {
            return self.weight.signum() * f64::INFINITY;
        }
        self.weight.signum() * log.exp()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpSum {
    terms: Vec<Term>,
}

impl ExpSum {
    /// Builds a sum, merging terms with equal `(rate, power)` and pruning
    /// negligible weights.
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        let mut slot: HashMap<(u64, u32), usize> = HashMap::new();
        for t in terms {
            // -0.0 and 0.0 are the same rate
            let key = ((t.rate + 0.0).to_bits(), t.power);
            match slot.get(&key) {
                Some(&i) => merged[i].weight += t.weight,
                None => {
                    slot.insert(key, merged.len());
                    merged.push(t);
                }
            }
        }
        let largest = merged.iter().fold(0.0_f64, |a, t| a.max(t.weight.abs()));
        merged.retain(|t| t.weight != 0.0 && (t.rate > 0.0 || t.weight.abs() >= PRUNE_RATIO * largest));
        ExpSum { terms: merged }
    }

    pub fn constant(c: f64) -> Self {
        Self::new([Term::new(c, 0.0, 0)])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `x`; the caller handles the `x < 0` convention.
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `Σ w` over the `p = 0` terms.
    pub fn at_zero(&self) -> f64 {
        self.terms.iter().filter(|t| t.power == 0).map(|t| t.weight).sum()
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.rate != 0.0 {
                out.push(Term::new(t.weight * t.rate, t.rate, t.power));
            }
            if t.power > 0 {
                out.push(Term::new(t.weight * t.power as f64, t.rate, t.power - 1));
            }
        }
        Self::new(out)
    }

    /// `x ↦ ∫₀^x f(y) dy`, exact.
    pub fn integral(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            out.extend(integral_term(t));
        }
        Self::new(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.terms.iter().map(|t| Term::new(t.weight * c, t.rate, t.power)))
    }

    pub fn add(&self, other: &ExpSum) -> Self {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn sub(&self, other: &ExpSum) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &ExpSum) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term::new(a.weight * b.weight, a.rate + b.rate, a.power + b.power));
            }
        }
        Self::new(out)
    }

    /// Splits off the `p = 0` terms with exactly this rate, returning their
    /// total weight and the remainder.
    pub fn split_rate(&self, rate: f64) -> (f64, ExpSum) {
        let (lead, rest): (Vec<Term>, Vec<Term>) = self.terms.iter().partition(|t| t.rate == rate && t.power == 0);
        (lead.iter().map(|t| t.weight).sum(), ExpSum { terms: rest })
    }

    /// Multiplication by `e^{c x}`.
    pub fn shift_rate(&self, c: f64) -> Self {
        Self::new(self.terms.iter().map(|t| Term::new(t.weight, t.rate + c, t.power)))
    }

    pub fn max_rate(&self) -> f64 {
        self.terms.iter().map(|t| t.rate).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫₀^∞ e^{-sx} f(x) dx = Σ w p! / (s - r)^{p+1}`, for `s > max rate`.
    pub fn laplace_transform(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * factorial(t.power) / (s - t.rate).powi(t.power as i32 + 1))
            .sum()
    }
}

fn factorial(p: u32) -> f64 {
    (1..=p).map(f64::from).product()
}

/// `∫₀^x y^p e^{ry} dy`. For `r ≠ 0` this uses
/// `I_p = x^p e^{rx}/r - (p/r) I_{p-1}`, `I_0 = (e^{rx} - 1)/r`.
fn integral_term(t: &Term) -> Vec<Term> {
    if t.rate == 0.0 {
        return vec![Term::new(t.weight / (t.power as f64 + 1.0), 0.0, t.power + 1)];
    }
    let r = t.rate;
    let mut out = Vec::with_capacity(t.power as usize + 2);
    let mut coeff = t.weight;
    let mut p = t.power;
    loop {
        out.push(Term::new(coeff / r, r, p));
        if p == 0 {
            out.push(Term::new(-coeff / r, 0.0, 0));
            break;
        }
        coeff *= -(p as f64) / r;
        p -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ExpSum {
        ExpSum::new([
            Term::new(1.5, 0.7, 0),
            Term::new(-0.4, -2.0, 0),
            Term::new(0.3, -1.1, 2),
            Term::new(0.2, 0.0, 1),
        ])
    }

    #[test]
    fn value_at_zero_is_sum_of_power_zero_weights() {
        let f = sample();
        assert!((f.eval(0.0) - 1.1).abs() < 1e-15);
        assert!((f.at_zero() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_polynomial_exponential() {
        // d/dx x² e^{-x} = 2x e^{-x} - x² e^{-x}
        let f = ExpSum::new([Term::new(1.0, -1.0, 2)]);
        let d = f.derivative();
        for x in [0.3f64, 1.0, 2.5] {
            let want = (2.0 * x - x * x) * (-x).exp();
            assert!((d.eval(x) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_of_polynomial_exponential() {
        // ∫₀^x y e^{-y} dy = 1 - (1 + x) e^{-x}
        let f = ExpSum::new([Term::new(1.0, -1.0, 1)]);
        let i = f.integral();
        for x in [0.0f64, 0.5, 3.0] {
            let want = 1.0 - (1.0 + x) * (-x).exp();
            assert!((i.eval(x) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn laplace_transform_of_exponential() {
        let f = ExpSum::new([Term::new(1.0, 1.0, 0), Term::new(-1.0, -1.0, 0)]);
        assert!((f.laplace_transform(2.0) - 2.0 / 3.0).abs() < 1e-15);
        let g = ExpSum::new([Term::new(1.0, -1.0, 2)]);
        assert!((g.laplace_transform(1.0) - 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_flagged_as_infinity() {
        let f = ExpSum::new([Term::new(1.0, 10.0, 0)]);
        assert!(f.eval(100.0).is_infinite());
        // tiny weight with a large exponent stays finite through log-space
        let g = ExpSum::new([Term::new(1e-300, 10.0, 0)]);
        assert!((g.eval(69.0) / (1e-300 * 690f64.exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_of_sums() {
        let f = ExpSum::new([Term::new(2.0, 1.0, 0), Term::new(1.0, -1.0, 1)]);
        let g = ExpSum::new([Term::new(3.0, -0.5, 0), Term::new(-1.0, 0.0, 0)]);
        let h = f.mul(&g);
        for x in [0.0, 0.4, 2.0] {
            assert!((h.eval(x) - f.eval(x) * g.eval(x)).abs() < 1e-13 * (1.0 + h.eval(x).abs()));
        }
        let (lead, rest) = f.split_rate(1.0);
        assert_eq!(lead, 2.0);
        assert_eq!(rest.len(), 1);
    }

    #[test]
    fn pruning_and_merging() {
        let f = ExpSum::new([Term::new(1.0, 0.5, 0), Term::new(1e-20, -3.0, 0), Term::new(2.0, 0.5, 0)]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.terms()[0].weight, 3.0);
    }

    proptest! {
        #[test]
        fn integral_then_derivative_is_identity(
            w in prop::collection::vec(-3.0f64..3.0, 1..5),
            r in prop::collection::vec(-4.0f64..2.0, 5),
            p in prop::collection::vec(0u32..3, 5),
            x in 0.0f64..3.0,
        ) {
            let f = ExpSum::new(w.iter().enumerate().map(|(i, w)| Term::new(*w, r[i], p[i])));
            let back = f.integral().derivative();
            // the recurrence carries weights of order w/r^{p+1} that cancel
            let scale = 1.0
                + f.terms().iter().map(|t| t.eval(x).abs()).sum::<f64>()
                + f.integral().terms().iter().map(|t| (t.weight * (t.rate.abs() + 1.0)).abs()).sum::<f64>();
            prop_assert!((back.eval(x) - f.eval(x)).abs() < 1e-9 * scale);
            prop_assert!(f.integral().eval(0.0).abs() < 1e-12 * scale);
        }

        #[test]
        fn derivative_matches_central_difference(
            w in prop::collection::vec(-3.0f64..3.0, 1..5),
            r in prop::collection::vec(-4.0f64..2.0, 5),
            p in prop::collection::vec(0u32..3, 5),
            x in 0.2f64..3.0,
        ) {
            let f = ExpSum::new(w.iter().enumerate().map(|(i, w)| Term::new(*w, r[i], p[i])));
            let h = 1e-5;
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            let scale = 1.0 + f.derivative().terms().iter().map(|t| t.eval(x).abs()).sum::<f64>();
            prop_assert!((fd - f.derivative().eval(x)).abs() < 1e-6 * scale);
        }
    }
}
