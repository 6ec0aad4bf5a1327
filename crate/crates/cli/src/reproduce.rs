//! The two bundled experiment sets: the Weibull-jump model under four
//! dividend problems, and the beta-family bounds with their tempered-stable
//! limit.

use std::path::Path;

use levy_scale::solvers::{self, SolverOptions};
use levy_scale::{meromorphic_bounds, CgmyTarget, SpectralModel};
use serde::Serialize;

use crate::config::Grid;
use crate::error::{CliError, Context};
use crate::run::{columns_csv, sweep_artifacts, write, write_json, Manifest, Prepared};

pub const WEIBULL_DRIFT: f64 = 0.1;
pub const WEIBULL_Q: f64 = 0.03;
pub const WEIBULL_SIGMAS: [f64; 3] = [0.0, 0.2, 0.4];
pub const BAILOUT_PHI: f64 = 1.3;

/// Reference levels per σ that the computed ones are compared against.
const REFERENCE_A: [f64; 3] = [0.05, 0.481, 0.643];
const REFERENCE_D: [f64; 3] = [0.38, 0.775, 1.495];
const REFERENCE_B: [(f64, [f64; 3]); 2] = [(-1.0, [0.0628, 0.0793, 0.1384]), (1.0, [0.0317, 0.0383, 0.0955])];
const REFERENCE_C: [(f64, [(f64, f64); 3]); 2] = [
    (0.5, [(0.0, 1.173), (0.069, 1.527), (0.0, 1.885)]),
    (0.1, [(0.0, 0.05), (0.222, 0.481), (0.197, 0.643)]),
];

pub const BETA_Q: f64 = 0.03;
pub const BETA_DEPTHS: [usize; 2] = [15, 150];
pub const CGMY_BETAS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

pub fn beta_model() -> levy_scale::Result<SpectralModel> {
    SpectralModel::beta_family(0.2, 0.1, 0.1, 3.0, 1.0, 1.5)
}

pub fn cgmy_target() -> CgmyTarget {
    CgmyTarget { c_tilde: 0.1, alpha_tilde: 3.0, shape: 1.5 }
}

#[derive(Serialize)]
struct Comparison {
    label: String,
    computed: Option<f64>,
    reference: f64,
    tolerance: f64,
    within: bool,
    /// Solver message when no level was produced.
    error: Option<String>,
}

impl Comparison {
    fn new(label: String, computed: Result<f64, String>, reference: f64, tolerance: f64) -> Self {
        let within = computed.as_ref().is_ok_and(|c| (c - reference).abs() <= tolerance);
        let (computed, error) = match computed {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e)),
        };
        Comparison { label, computed, reference, tolerance, within, error }
    }
}

#[derive(Serialize)]
struct WeibullSummary {
    within: usize,
    total: usize,
    comparisons: Vec<Comparison>,
    manifests: Vec<Manifest>,
}

fn level(r: levy_scale::Result<levy_scale::PolicyResult>, k: usize) -> Result<f64, String> {
    r.map(|p| p.levels[k]).map_err(|e| e.to_string())
}

/// Value functions and level comparisons for σ ∈ {0, 0.2, 0.4}.
pub fn weibull(dir: &Path, grid: &Grid, tol: f64) -> Result<(), CliError> {
    let opts = SolverOptions::default();
    let x = grid.points()?;
    let headers: Vec<String> = WEIBULL_SIGMAS.iter().map(|s| format!("sigma_{s}")).collect();
    let eval = |p: &levy_scale::Result<levy_scale::PolicyResult>| -> Vec<f64> {
        match p {
            Ok(p) => x.iter().map(|&v| p.value_fn.eval(v)).collect(),
            Err(_) => vec![f64::NAN; x.len()],
        }
    };

    let mut comparisons = Vec::new();
    let mut manifests = Vec::new();
    let mut classic = Vec::new();
    let mut bailout = Vec::new();
    let mut terminal: Vec<Vec<Vec<f64>>> = vec![Vec::new(); REFERENCE_B.len()];
    let mut impulse: Vec<Vec<Vec<f64>>> = vec![Vec::new(); REFERENCE_C.len()];
    for (i, sigma) in WEIBULL_SIGMAS.into_iter().enumerate() {
        let model = levy_scale::weibull_model(sigma, WEIBULL_DRIFT)?;
        let prepared = Prepared::new(model, WEIBULL_Q, 1, tol)?;
        manifests.push(prepared.manifest("reproduce 5.1")?);
        let b = prepared.bundle();
        write(dir, &format!("scale_sigma_{sigma}.csv"), &b.to_csv(&x))?;

        let r = solvers::classic_barrier(&b, &opts);
        classic.push(eval(&r));
        comparisons.push(Comparison::new(format!("a* sigma={sigma}"), level(r, 0), REFERENCE_A[i], 0.01));

        let r = solvers::bailout_barrier(&b, BAILOUT_PHI, &opts);
        bailout.push(eval(&r));
        comparisons.push(Comparison::new(format!("d* sigma={sigma}"), level(r, 0), REFERENCE_D[i], 0.01));

        for (j, (s, reference)) in REFERENCE_B.iter().enumerate() {
            let r = solvers::terminal_barrier(&b, *s, 0.0, &opts);
            terminal[j].push(eval(&r));
            comparisons.push(Comparison::new(format!("b*(S={s}) sigma={sigma}"), level(r, 0), reference[i], 0.005));
        }
        for (j, (delta, reference)) in REFERENCE_C.iter().enumerate() {
            let r = solvers::impulse_policy(&b, *delta, &opts);
            impulse[j].push(eval(&r));
            let pair = r.map(|p| (p.levels[0], p.levels[1])).map_err(|e| e.to_string());
            let (c1, c2) = reference[i];
            comparisons.push(Comparison::new(format!("c1*(delta={delta}) sigma={sigma}"), pair.clone().map(|p| p.0), c1, 0.02));
            comparisons.push(Comparison::new(format!("c2*(delta={delta}) sigma={sigma}"), pair.map(|p| p.1), c2, 0.02));
        }
    }

    write(dir, "classic_values.csv", &columns_csv(&headers, &x, &classic))?;
    write(dir, "bailout_values.csv", &columns_csv(&headers, &x, &bailout))?;
    for ((s, _), cols) in REFERENCE_B.iter().zip(&terminal) {
        write(dir, &format!("terminal_values_S{s}.csv"), &columns_csv(&headers, &x, cols))?;
    }
    for ((delta, _), cols) in REFERENCE_C.iter().zip(&impulse) {
        write(dir, &format!("impulse_values_delta{delta}.csv"), &columns_csv(&headers, &x, cols))?;
    }
    let within = comparisons.iter().filter(|c| c.within).count();
    let total = comparisons.len();
    write_json(dir, "summary.json", &WeibullSummary { within, total, comparisons, manifests })
}

#[derive(Serialize)]
struct DepthSummary {
    m: usize,
    delta_m: f64,
    epsilon_m: Option<f64>,
    xi_next: f64,
    classic_interval: Option<(f64, f64)>,
    classic_estimate: f64,
    bailout_interval: (f64, f64),
}

#[derive(Serialize)]
struct BetaSummary {
    depths: Vec<DepthSummary>,
    /// Whether the shallow classic interval contains the deeper estimate.
    nested_estimate_contained: bool,
}

/// Truncation bounds at two depths and the tempered-stable sweep.
pub fn beta(dir: &Path, grid: &Grid) -> Result<(), CliError> {
    let opts = SolverOptions::default();
    let x = grid.points()?;
    let model = beta_model()?;
    let mut depths = Vec::new();
    for m in BETA_DEPTHS {
        let b = meromorphic_bounds(&model, BETA_Q, m, levy_scale::roots::DEFAULT_TOL).context(format_args!("bounds at depth {m}"))?;
        write(dir, &format!("bounds_m{m}.csv"), &b.to_csv(&x))?;
        let certified = solvers::classic_bounds(&b, &opts).context("certified classic barrier")?;
        let sandwich = &certified.sandwich;
        let cols = vec![
            x.iter().map(|&v| sandwich.lower(v)).collect(),
            x.iter().map(|&v| sandwich.upper(v)).collect(),
            x.iter().map(|&v| certified.policy.value_fn.eval(v)).collect(),
        ];
        let headers = ["value_lower".to_string(), "value_upper".into(), "value_estimate".into()];
        write(dir, &format!("value_bounds_m{m}.csv"), &columns_csv(&headers, &x, &cols))?;
        depths.push(DepthSummary {
            m,
            delta_m: b.delta_m,
            epsilon_m: b.epsilon_m.is_finite().then_some(b.epsilon_m),
            xi_next: b.xi_next,
            classic_interval: certified.policy.level_interval,
            classic_estimate: certified.policy.levels[0],
            bailout_interval: solvers::bailout_bounds(&b, BAILOUT_PHI, &opts).context("certified bail-out barrier")?,
        });
    }
    let nested_estimate_contained = depths[0]
        .classic_interval
        .is_some_and(|(lo, hi)| lo <= depths[1].classic_estimate && depths[1].classic_estimate <= hi);
    write_json(dir, "summary.json", &BetaSummary { depths, nested_estimate_contained })?;

    let sweep_grid = Grid { x_min: 0.0, x_max: 3.0, step: grid.step }.points()?;
    let sweep = solvers::cgmy_sweep(&cgmy_target(), 0.2, 0.1, BETA_Q, &CGMY_BETAS, BETA_DEPTHS[1], &sweep_grid, &opts)
        .context("tempered-stable sweep")?;
    sweep_artifacts(dir, &sweep)
}
