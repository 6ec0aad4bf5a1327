//! Optimal dividend problems solved on top of a [`ScaleBundle`]: the
//! classical barrier, the bail-out barrier with capital injection, the
//! barrier with an affine terminal payoff and the `(c₁, c₂)` impulse policy
//! with fixed transaction cost. The `*_bounds` variants certify the
//! barrier from meromorphic truncation bounds.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::{BoundWhich, TruncationBounds};
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Term};
use crate::model::CgmyTarget;
use crate::roots::bisect;
use crate::scale::{ScaleBundle, Which};

/// Upper end of any doubling search.
const SEARCH_LIMIT: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Golden-section tolerance and first-order residual scale.
    pub tol: f64,
    /// Right end of the scans for `d*` and `b*`.
    pub horizon: f64,
    /// Coarse grid step for the `b*` and `w*` searches.
    pub grid_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, horizon: 50.0, grid_step: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolicyKind {
    ClassicBarrier,
    BailOut,
    TerminalValue,
    Impulse,
}

/// `v(x) = body(x)` on `[0, threshold]` and `x - threshold + v(threshold)`
/// beyond.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueFunction {
    pub body: ExpSum,
    pub threshold: f64,
    pub value_at_threshold: f64,
}

impl ValueFunction {
    fn new(body: ExpSum, threshold: f64) -> Self {
        let value_at_threshold = body.eval(threshold);
        ValueFunction { body, threshold, value_at_threshold }
    }

    /// Defined for `x ≥ 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.threshold {
            self.body.eval(x)
        } else {
            x - self.threshold + self.value_at_threshold
        }
    }

    /// Left derivative at the threshold; 1 under smooth fit.
    pub fn slope_at_threshold(&self) -> f64 {
        self.body.derivative().eval(self.threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyResult {
    pub kind: PolicyKind,
    /// `[a*]`, `[d*]`, `[b*]` or `[c₁*, c₂*]`.
    pub levels: Vec<f64>,
    pub level_interval: Option<(f64, f64)>,
    pub value_fn: ValueFunction,
    pub diagnostics: BTreeMap<String, f64>,
}

fn diag<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Root of an increasing-at-infinity function, starting from `lo` where it
/// is negative, with the right end doubled until the sign flips.
fn root_beyond<F: Fn(f64) -> f64>(f: F, lo: f64, what: &str) -> Result<f64> {
    let mut width = 1.0;
    let mut hi = lo + width;
    while f(hi) <= 0.0 {
        width *= 2.0;
        hi = lo + width;
        if hi > SEARCH_LIMIT {
            return Err(Error::BracketFailure { what: what.into(), lo, hi });
        }
    }
    bisect(|x| Ok(f(x)), lo, hi, what).map(|r| r.0)
}

/// Maximiser of `f` on `[lo, hi]` by golden-section search.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi].into_iter().fold(mid, |best, x| if f(x) > f(best) { x } else { best })
}

/// Grid argmax followed by golden-section refinement on the neighbouring
/// cells.
fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64, tol: f64) -> f64 {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = f(lo + i as f64 * step);
        if v > best.1 {
            best = (i, v);
        }
    }
    let a = lo + best.0.saturating_sub(1) as f64 * step;
    let b = (lo + (best.0 + 1) as f64 * step).min(hi);
    golden_max(f, a, b, tol)
}

/// First point in `[0, horizon]` where `f` turns non-positive, located on a
/// grid of `n` cells and refined by bisection. `None` if `f > 0` throughout.
fn first_nonpositive<F: Fn(f64) -> f64>(f: F, horizon: f64, n: usize, what: &str) -> Result<Option<f64>> {
    if f(0.0) <= 0.0 {
        return Ok(Some(0.0));
    }
    let h = horizon / n as f64;
    let mut prev = 0.0;
    for i in 1..=n {
        let x = i as f64 * h;
        if f(x) <= 0.0 {
            return bisect(|y| Ok(if f(y) <= 0.0 { -1.0 } else { 1.0 }), prev, x, what).map(|r| Some(r.0));
        }
        prev = x;
    }
    Ok(None)
}

/// Zero of `W''`, or 0 when `W''(0+) ≥ 0`.
fn inflection(wpp: &ExpSum) -> Result<f64> {
    if wpp.eval(0.0) >= 0.0 {
        Ok(0.0)
    } else {
        root_beyond(|x| wpp.eval(x), 0.0, "zero of W''")
    }
}

/// Classical barrier: `a*` solves `W''(a*) = 0`; the value is
/// `W(x)/W'(a*)` below the barrier.
pub fn classic_barrier(bundle: &ScaleBundle, _opts: &SolverOptions) -> Result<PolicyResult> {
    let a = inflection(&bundle.wpp)?;
    let wp_a = bundle.eval(Which::Wp, a);
    let value_fn = ValueFunction::new(bundle.w.scale(1.0 / wp_a), a);
    let diagnostics = diag([
        ("wpp_at_level", bundle.eval(Which::Wpp, a)),
        ("wpp_at_zero", bundle.eval(Which::Wpp, 0.0)),
        ("wp_at_level", wp_a),
        ("smooth_fit_slope", value_fn.slope_at_threshold()),
    ]);
    Ok(PolicyResult { kind: PolicyKind::ClassicBarrier, levels: vec![a], level_interval: None, value_fn, diagnostics })
}

/// `(φZ - 1)V - φqW²` with `Z`, `V` and `W` each split into an `e^{ζx}`
/// part and a remainder. The `e^{2ζx}` coefficient `φ(z₀v₀ - q w₀²)`
/// vanishes identically in every use (`z₀ = q w₀/ζ`, `v₀ = ζ w₀`), so it is
/// dropped rather than left to cancel in floating point, where the residue
/// swamps `G`.
pub struct BailoutCriterion {
    phi: f64,
    q: f64,
    zeta: f64,
    z0: f64,
    v0: f64,
    w0: f64,
    z_rest: ExpSum,
    v_rest: ExpSum,
    w_rest: ExpSum,
}

impl BailoutCriterion {
    pub fn new(z: &ExpSum, v: &ExpSum, w: &ExpSum, phi: f64, q: f64, zeta: f64) -> Self {
        let (z0, z_rest) = z.split_rate(zeta);
        let (v0, v_rest) = v.split_rate(zeta);
        let (w0, w_rest) = w.split_rate(zeta);
        BailoutCriterion { phi, q, zeta, z0, v0, w0, z_rest, v_rest, w_rest }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (phi, q) = (self.phi, self.q);
        let (zr, vr, wr) = (self.z_rest.eval(x), self.v_rest.eval(x), self.w_rest.eval(x));
        let cross = phi * (self.z0 * vr + self.v0 * zr) - self.v0 - 2.0 * phi * q * self.w0 * wr;
        (self.zeta * x).exp() * cross + (phi * zr - 1.0) * vr - phi * q * wr * wr
    }
}

fn bundle_criterion(bundle: &ScaleBundle, phi: f64) -> BailoutCriterion {
    BailoutCriterion::new(&bundle.z, &bundle.wp, &bundle.w, phi, bundle.q, bundle.zeta)
}

/// `G(a) = (φZ(a) - 1)W'(a) - φqW(a)²`.
pub fn bailout_g(bundle: &ScaleBundle, phi: f64, a: f64) -> f64 {
    bundle_criterion(bundle, phi).eval(a.max(0.0))
}

/// Bail-out barrier `d* = inf{a > 0 : G(a) ≤ 0}` with value
/// `φ(∫₀^x Z + ψ'(0+)/q) + Z(x)(1 - φZ(d*))/(qW(d*))`.
pub fn bailout_barrier(bundle: &ScaleBundle, phi: f64, opts: &SolverOptions) -> Result<PolicyResult> {
    if !(phi > 1.0) {
        return Err(Error::InvalidArgument(format!("capital cost φ must exceed 1, got {phi}")));
    }
    if !bundle.mean.is_finite() {
        return Err(Error::InvalidArgument("bail-out value needs a finite mean ψ'(0+)".into()));
    }
    let q = bundle.q;
    let n = (opts.horizon / opts.grid_step).ceil() as usize;
    let g = bundle_criterion(bundle, phi);
    let d = first_nonpositive(|a| g.eval(a), opts.horizon, n, "bail-out barrier")?
        .ok_or(Error::NoSignChange { horizon: opts.horizon })?;
    let w_d = bundle.eval(Which::W, d);
    let body = if w_d > 0.0 {
        let zeta = bundle.zeta;
        let coef = (1.0 - phi * bundle.eval(Which::Z, d)) / (q * w_d);
        let (z0, z_rest) = bundle.z.split_rate(zeta);
        let (_, int_z_rest) = bundle.int_z.split_rate(zeta);
        let (_, w_rest) = bundle.w.split_rate(zeta);
        // the e^{ζx} weight z₀(φ/ζ + coef), with the e^{ζd} parts of Z(d)
        // and qW(d)/ζ cancelled by hand
        let lead = z0 * (1.0 + phi * (q * w_rest.eval(d) / zeta - z_rest.eval(d))) / (q * w_d);
        int_z_rest
            .scale(phi)
            .add(&ExpSum::constant(phi * bundle.mean / q))
            .add(&z_rest.scale(coef))
            .add(&ExpSum::new([Term::new(lead, zeta, 0)]))
    } else {
        // d* = 0 with W(0) = 0: everything above 0 is paid out at once
        ExpSum::constant(phi * bundle.mean / q)
    };
    let value_fn = ValueFunction::new(body, d);
    let diagnostics = diag([("g_at_level", g.eval(d)), ("phi", phi)]);
    Ok(PolicyResult { kind: PolicyKind::BailOut, levels: vec![d], level_interval: None, value_fn, diagnostics })
}

/// `A(x) = K(Z(x) - ψ'(0+)W(x)) + SqW(x)` as an exponential sum.
fn terminal_a(bundle: &ScaleBundle, s: f64, k: f64) -> ExpSum {
    bundle.z.scale(k).add(&bundle.w.scale(s * bundle.q - k * bundle.mean))
}

/// Barrier with terminal payoff `S + K·(deficit)`: `b*` maximises
/// `F(x) = (1 - A(x))/W'(x)`; the value is
/// `S + ∫₀^x A + ((1 - A(b*))/W'(b*)) W(x)`.
pub fn terminal_barrier(bundle: &ScaleBundle, s: f64, k: f64, opts: &SolverOptions) -> Result<PolicyResult> {
    if k != 0.0 && !bundle.mean.is_finite() {
        return Err(Error::InvalidArgument("terminal payoff with K ≠ 0 needs a finite mean".into()));
    }
    let a = terminal_a(bundle, s, k);
    let f = |x: f64| (1.0 - a.eval(x)) / bundle.eval(Which::Wp, x);
    let b = grid_max(f, 0.0, opts.horizon, opts.grid_step, opts.tol);
    if b <= opts.tol {
        return Err(Error::RunStrategySignal { f0: f(0.0) });
    }
    let coef = (1.0 - a.eval(b)) / bundle.eval(Which::Wp, b);
    let body = ExpSum::constant(s).add(&a.integral()).add(&bundle.w.scale(coef));
    let value_fn = ValueFunction::new(body, b);
    let h = 1e-6 * b.max(1.0);
    let diagnostics = diag([
        ("f_at_level", f(b)),
        ("f_slope_at_level", (f(b + h) - f(b - h)) / (2.0 * h)),
        ("smooth_fit_slope", value_fn.slope_at_threshold()),
    ]);
    Ok(PolicyResult { kind: PolicyKind::TerminalValue, levels: vec![b], level_interval: None, value_fn, diagnostics })
}

/// `g(c₁, c₂) = (W(c₂) - W(c₁))/(c₂ - c₁ - δ)`.
pub fn impulse_g(bundle: &ScaleBundle, delta: f64, c1: f64, c2: f64) -> f64 {
    (bundle.eval(Which::W, c2) - bundle.eval(Which::W, c1)) / (c2 - c1 - delta)
}

/// `(c₁, c₂)` impulse policy with transaction cost `δ`: minimises `g` over
/// `c₂ ≥ c₁ + δ`. Interior optima satisfy `W'(c₁) = W'(c₂) = g(c₁, c₂)`;
/// the boundary `c₁ = 0` needs only `W'(c₂) = g(0, c₂)`.
pub fn impulse_policy(bundle: &ScaleBundle, delta: f64, opts: &SolverOptions) -> Result<PolicyResult> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("transaction cost must be positive, got {delta}")));
    }
    let a_star = inflection(&bundle.wpp)?;
    let wp = |x: f64| bundle.eval(Which::Wp, x);
    let w = |x: f64| bundle.eval(Which::W, x);
    let upper_crossing = |y: f64| root_beyond(|x| wp(x) - y, a_star, "upper slope crossing");
    let lower_crossing = |y: f64| -> Result<f64> {
        bisect(|x| Ok(wp(x) - y), 0.0, a_star, "lower slope crossing").map(|r| r.0)
    };

    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let wp0 = wp(0.0);
    if a_star > 0.0 {
        let h = |y: f64| -> Result<f64> {
            let c1 = if y >= wp0 { 0.0 } else { lower_crossing(y)? };
            let c2 = upper_crossing(y)?;
            Ok(w(c2) - w(c1) - y * (c2 - c1 - delta))
        };
        let y_min = wp(a_star);
        if wp0.is_finite() && h(wp0)? < 0.0 {
            let (y, _) = bisect(h, y_min, wp0, "impulse slope level")?;
            candidates.push((lower_crossing(y)?, upper_crossing(y)?));
        } else if !wp0.is_finite() {
            let mut y_hi = 2.0 * y_min;
            while h(y_hi)? >= 0.0 {
                y_hi *= 2.0;
                if !y_hi.is_finite() {
                    return Err(Error::Degenerate("no interior slope level".into()));
                }
            }
            let (y, _) = bisect(h, y_min, y_hi, "impulse slope level")?;
            candidates.push((lower_crossing(y)?, upper_crossing(y)?));
        }
    }
    if wp0.is_finite() {
        // c₁ = 0: W'(c₂)(c₂ - δ) - (W(c₂) - W(0)) = 0 beyond max(δ, a*)
        let w0 = w(0.0);
        let k = |c2: f64| wp(c2) * (c2 - delta) - (w(c2) - w0);
        let c2 = root_beyond(k, delta.max(a_star), "impulse upper level")?;
        candidates.push((0.0, c2));
    }
    let (c1, c2) = candidates
        .into_iter()
        .filter(|(c1, c2)| c2 - c1 - delta > 0.0)
        .min_by(|p, r| impulse_g(bundle, delta, p.0, p.1).total_cmp(&impulse_g(bundle, delta, r.0, r.1)))
        .ok_or_else(|| Error::Degenerate("no admissible (c1, c2) pair".into()))?;

    let g = impulse_g(bundle, delta, c1, c2);
    let monotone = (0..=200)
        .map(|i| c2 + i as f64 * opts.horizon.min(10.0) / 200.0)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|p| wp(p[1]) >= wp(p[0]));
    let value_fn = ValueFunction::new(bundle.w.scale(1.0 / g), c2);
    let diagnostics = diag([
        ("g", g),
        ("wp_at_upper_minus_g", wp(c2) - g),
        ("wp_at_lower_minus_g", if c1 > 0.0 { wp(c1) - g } else { 0.0 }),
        ("post_threshold_monotone", if monotone { 1.0 } else { 0.0 }),
    ]);
    Ok(PolicyResult { kind: PolicyKind::Impulse, levels: vec![c1, c2], level_interval: None, value_fn, diagnostics })
}

/// Minimum of `f` on `(0, horizon]` from a grid and golden-section
/// refinement.
fn grid_min<F: Fn(f64) -> f64>(f: F, opts: &SolverOptions) -> (f64, f64) {
    let x = grid_max(|x| -f(x), opts.grid_step * 1e-3, opts.horizon, opts.grid_step, opts.tol);
    (x, f(x))
}

/// Pointwise bounds on the classical value `u_{a*}` below the barrier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueSandwich {
    pub w_upper: ExpSum,
    pub delta_m: f64,
    pub xi_m: f64,
    /// `w_* = min w̲`.
    pub slope_lower: f64,
    /// `w* = min (w̄ ∧ w̃)`.
    pub slope_upper: f64,
}

impl ValueSandwich {
    pub fn lower(&self, x: f64) -> f64 {
        (self.w_upper.eval(x) - self.delta_m * (1.0 + (-self.xi_m * x).exp())) / self.slope_upper
    }

    pub fn upper(&self, x: f64) -> f64 {
        self.w_upper.eval(x) / self.slope_lower
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedBarrier {
    /// Point estimate from the approximant `W̄`, with `a*` certified to lie
    /// in `level_interval`.
    pub policy: PolicyResult,
    pub sandwich: ValueSandwich,
}

/// `a* ∈ {x ≥ 0 : w̲(x) ≤ w*}`.
pub fn classic_bounds(bounds: &TruncationBounds, opts: &SolverOptions) -> Result<CertifiedBarrier> {
    let wl = &bounds.wp_lower;
    let x_low = inflection(&wl.derivative())?;
    let slope_lower = wl.eval(x_low);
    let (_, slope_upper) = grid_min(|x| bounds.wp_best_upper(x), opts);
    if slope_upper < slope_lower {
        return Err(Error::EmptyInterval { lower: slope_lower, upper: slope_upper });
    }
    let below = |x: f64| wl.eval(x) - slope_upper;
    let lo = if below(0.0) <= 0.0 || x_low == 0.0 {
        0.0
    } else {
        bisect(|x| Ok(below(x)), 0.0, x_low, "certified interval left end")?.0
    };
    let hi = root_beyond(below, x_low, "certified interval right end")?;

    let mut policy = classic_barrier(&bounds.approximant(), opts)?;
    policy.level_interval = Some((lo, hi));
    policy.diagnostics.insert("slope_lower".into(), slope_lower);
    policy.diagnostics.insert("slope_upper".into(), slope_upper);
    policy.diagnostics.insert("delta_m".into(), bounds.delta_m);
    let xi_m = *bounds.xis.last().expect("m ≥ 1");
    let sandwich = ValueSandwich { w_upper: bounds.w_upper.clone(), delta_m: bounds.delta_m, xi_m, slope_lower, slope_upper };
    Ok(CertifiedBarrier { policy, sandwich })
}

/// `(d̲*, d̄*)` from `G̲ = (φZ̲ - 1)w̲ - φqW̄²` and
/// `Ḡ = (φZ̄ - 1)w̄ - φqW̲²`.
pub fn bailout_bounds(bounds: &TruncationBounds, phi: f64, opts: &SolverOptions) -> Result<(f64, f64)> {
    if !(phi > 1.0) {
        return Err(Error::InvalidArgument(format!("capital cost φ must exceed 1, got {phi}")));
    }
    let (q, zeta) = (bounds.q, bounds.zeta);
    let low = BailoutCriterion::new(&bounds.z_lower, &bounds.wp_lower, &bounds.w_upper, phi, q, zeta);
    // w̄ is only known pointwise: Ḡ = [(φZ̄ - 1)w̲ - φqW̲²] + (φZ̄ - 1)(w̄ - w̲)
    let up_base = BailoutCriterion::new(&bounds.z_upper, &bounds.wp_lower, &bounds.w_lower, phi, q, zeta);
    let g_low = |a: f64| low.eval(a);
    let g_up = |a: f64| {
        let excess = bounds.wp_best_upper(a) - bounds.eval(BoundWhich::WpLower, a);
        up_base.eval(a) + (phi * bounds.eval(BoundWhich::ZUpper, a) - 1.0) * excess
    };
    let n = (opts.horizon / opts.grid_step).ceil() as usize;
    let lo = first_nonpositive(g_low, opts.horizon, n, "bail-out lower bound")?
        .ok_or(Error::NoSignChange { horizon: opts.horizon })?;
    let hi = first_nonpositive(g_up, opts.horizon, n, "bail-out upper bound")?
        .ok_or(Error::NoSignChange { horizon: opts.horizon })?;
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CgmySweep {
    pub betas: Vec<f64>,
    /// Truncation depth used at each `β`.
    pub depths: Vec<usize>,
    pub barriers: Vec<f64>,
    pub deltas: Vec<f64>,
    /// `sup_x |u_{β_i}(x) - u_{β_{i+1}}(x)|` over the grid.
    pub value_sup_diffs: Vec<f64>,
    /// `sup_x |W_{β_i}(x) - W_{β_{i+1}}(x)|` over the grid.
    pub scale_sup_diffs: Vec<f64>,
    /// Jump density at `z = -1` for each `β`.
    pub density_at_minus_one: Vec<f64>,
    pub target_density_at_minus_one: f64,
    /// Midpoint value functions, one column per `β`.
    pub values: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
}

/// Walks the beta-family approximations of a tempered-stable target along
/// a decreasing sequence of `β` and records how the midpoint value
/// functions settle.
///
/// The poles are spaced `β` apart, so the depth at each `β` is
/// `⌈m/β⌉`; a fixed depth would let truncation error grow as `β` shrinks
/// and swamp the convergence being measured.
pub fn cgmy_sweep(
    target: &CgmyTarget,
    sigma: f64,
    drift: f64,
    q: f64,
    betas: &[f64],
    m: usize,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<CgmySweep> {
    if betas.is_empty() || betas.windows(2).any(|w| !(w[1] < w[0])) || betas.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::InvalidArgument("β sequence must be positive and strictly decreasing".into()));
    }
    let mut depths = Vec::new();
    let mut barriers = Vec::new();
    let mut deltas = Vec::new();
    let mut values = Vec::new();
    let mut scales = Vec::new();
    let mut densities = Vec::new();
    for &beta in betas {
        let family = target.beta_approximation(beta);
        densities.push(family.density(-1.0));
        let model = crate::model::SpectralModel::new(sigma, drift, crate::model::JumpModel::BetaFamily(family))?;
        let depth = (m as f64 / beta).ceil() as usize;
        let bounds = crate::bounds::meromorphic_bounds(&model, q, depth, crate::roots::DEFAULT_TOL)?;
        depths.push(depth);
        let mid = bounds.midpoint();
        let policy = classic_barrier(&mid, opts)?;
        barriers.push(policy.levels[0]);
        deltas.push(bounds.delta_m);
        values.push(grid.iter().map(|&x| policy.value_fn.eval(x)).collect::<Vec<_>>());
        scales.push(grid.iter().map(|&x| mid.eval(Which::W, x)).collect::<Vec<_>>());
    }
    let sup_diff = |rows: &[Vec<f64>]| -> Vec<f64> {
        rows.windows(2)
            .map(|p| p[0].iter().zip(&p[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .collect()
    };
    Ok(CgmySweep {
        betas: betas.to_vec(),
        depths,
        barriers,
        deltas,
        value_sup_diffs: sup_diff(&values),
        scale_sup_diffs: sup_diff(&scales),
        density_at_minus_one: densities,
        target_density_at_minus_one: target.density(-1.0),
        values,
        grid: grid.to_vec(),
    })
}
