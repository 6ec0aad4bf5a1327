use std::path::Path;

use levy_scale::coeffs::{check_identities, factor, IdentityDiagnostics};
use levy_scale::roots::root_system;
use levy_scale::scale::{laplace_check, push_row};
use levy_scale::solvers::{self, SolverOptions};
use levy_scale::{
    build_scale_meromorphic, finite_scale, FactorCoefficients, JumpModel, PolicyResult, RootSystem, ScaleBundle,
    SpectralModel, TruncationBounds,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Context};

/// Residual above which a run is marked FAILED.
pub const CHECK_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SolveKind {
    Classic,
    Bailout,
    Terminal,
    Impulse,
}

pub enum Scales {
    Exact(ScaleBundle),
    Truncated(TruncationBounds),
}

/// Everything up to the scale functions, computed once per run.
pub struct Prepared {
    pub model: SpectralModel,
    pub q: f64,
    pub tol: f64,
    pub roots: RootSystem,
    pub coeffs: FactorCoefficients,
    pub scales: Scales,
}

impl Prepared {
    pub fn new(model: SpectralModel, q: f64, m: usize, tol: f64) -> Result<Self, CliError> {
        if matches!(model.jumps(), JumpModel::CgmyTarget(_)) {
            return Err(CliError::Validation(
                "a tempered-stable target has no exponent of its own; use cgmy-sweep".into(),
            ));
        }
        if model.is_finite() {
            let (roots, coeffs, bundle) = finite_scale(&model, q, tol).context("exact scale functions")?;
            return Ok(Prepared { model, q, tol, roots, coeffs, scales: Scales::Exact(bundle) });
        }
        let roots = root_system(&model, q, m, tol).context(format_args!("roots at depth {m}"))?;
        let coeffs = factor(&model, &roots, m).context("Wiener-Hopf weights")?;
        let bounds = build_scale_meromorphic(&model, &roots, &coeffs).context("truncation bounds")?;
        Ok(Prepared { model, q, tol, roots, coeffs, scales: Scales::Truncated(bounds) })
    }

    /// The exact bundle, or the upper approximant for a truncated model.
    pub fn bundle(&self) -> ScaleBundle {
        match &self.scales {
            Scales::Exact(b) => b.clone(),
            Scales::Truncated(t) => t.approximant(),
        }
    }

    pub fn manifest(&self, verb: &str) -> Result<Manifest, CliError> {
        let fc = &self.coeffs;
        let bundle = self.bundle();
        let s_grid: Vec<f64> = (0..10).map(|i| bundle.zeta + 0.1 * 100f64.powf(i as f64 / 9.0)).collect();
        let laplace = laplace_check(&bundle, &self.model, &s_grid).context("transform check")?;
        let identities = check_identities(fc);
        let root_residual = self.roots.residuals.iter().copied().fold(self.roots.zeta_residual, f64::max);
        let exact = matches!(self.scales, Scales::Exact(_));

        let mut failures = Vec::new();
        if exact && identities.worst_exact() > CHECK_THRESHOLD {
            failures.push(format!("identity residual {:.3e}", identities.worst_exact()));
        }
        if exact && laplace > CHECK_THRESHOLD {
            failures.push(format!("transform error {laplace:.3e}"));
        }
        if root_residual > CHECK_THRESHOLD {
            failures.push(format!("root residual {root_residual:.3e}"));
        }
        Ok(Manifest {
            verb: verb.to_string(),
            model: self.model.clone(),
            q: self.q,
            tol: self.tol,
            truncation_depth: (!exact).then_some(fc.m),
            zeta: fc.zeta,
            psi_prime_zeta: fc.psi_prime_zeta,
            varrho: fc.varrho,
            theta: finite(fc.theta),
            kappa: fc.kappa,
            delta_m: fc.delta_m,
            epsilon_m: finite(fc.epsilon_m),
            w0: fc.w0,
            atom: fc.atom,
            roots_found: self.roots.xis.len(),
            root_residual,
            identities,
            laplace_worst_error: laplace,
            laplace_is_truncation_error: !exact,
            status: if failures.is_empty() { "OK" } else { "FAILED" }.to_string(),
            failures,
        })
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub verb: String,
    pub model: SpectralModel,
    pub q: f64,
    pub tol: f64,
    /// Absent for rational models, whose factorisation is exact.
    pub truncation_depth: Option<usize>,
    pub zeta: f64,
    pub psi_prime_zeta: f64,
    pub varrho: f64,
    /// Absent when infinite.
    pub theta: Option<f64>,
    pub kappa: f64,
    pub delta_m: f64,
    pub epsilon_m: Option<f64>,
    pub w0: f64,
    pub atom: f64,
    pub roots_found: usize,
    pub root_residual: f64,
    pub identities: IdentityDiagnostics,
    pub laplace_worst_error: f64,
    /// The transform check of a truncated model measures the truncation,
    /// so it does not fail the run.
    pub laplace_is_truncation_error: bool,
    pub status: String,
    pub failures: Vec<String>,
}

impl Manifest {
    pub fn into_result(self) -> Result<(), CliError> {
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::ChecksFailed(self.failures.join("; ")))
        }
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io { path, source: e })
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serialises");
    text.push('\n');
    write(dir, name, &text)
}

/// CSV with an `x` column followed by one column per series.
pub fn columns_csv(headers: &[String], grid: &[f64], columns: &[Vec<f64>]) -> String {
    let mut out = String::from("x");
    for h in headers {
        out.push(',');
        out.push_str(h);
    }
    out.push('\n');
    let mut row = Vec::with_capacity(columns.len() + 1);
    for (i, &x) in grid.iter().enumerate() {
        row.clear();
        row.push(x);
        row.extend(columns.iter().map(|c| c[i]));
        push_row(&mut out, &row);
    }
    out
}

fn finish(prepared: &Prepared, verb: &str, dir: &Path) -> Result<(), CliError> {
    let manifest = prepared.manifest(verb)?;
    write_json(dir, "manifest.json", &manifest)?;
    manifest.into_result()
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    Prepared::new(cfg.model.build()?, cfg.q, cfg.m, cfg.tol)
}

pub fn scale(cfg: &RunConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let grid = cfg.grid.points()?;
    let dir = cfg.out_dir();
    write(dir, "scale.csv", &p.bundle().to_csv(&grid))?;
    finish(&p, "scale", dir)
}

#[derive(Serialize)]
struct RootsArtifact<'a> {
    roots: &'a RootSystem,
    weights: &'a [f64],
    c: &'a [f64],
}

pub fn roots(cfg: &RunConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let dir = cfg.out_dir();
    write_json(dir, "roots.json", &RootsArtifact { roots: &p.roots, weights: &p.coeffs.a, c: &p.coeffs.c })?;
    finish(&p, "roots", dir)
}

fn required(value: Option<f64>, name: &str, kind: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("solver parameter {name:?} is required for {kind}")))
}

pub fn solve_policy(bundle: &ScaleBundle, cfg: &RunConfig, kind: SolveKind, opts: &SolverOptions) -> Result<PolicyResult, CliError> {
    let params = &cfg.solver;
    match kind {
        SolveKind::Classic => solvers::classic_barrier(bundle, opts).context("classic barrier"),
        SolveKind::Bailout => {
            let phi = required(params.phi, "phi", "bailout")?;
            solvers::bailout_barrier(bundle, phi, opts).context("bail-out barrier")
        }
        SolveKind::Terminal => {
            let (s, k) = (params.s.unwrap_or(0.0), params.k.unwrap_or(0.0));
            solvers::terminal_barrier(bundle, s, k, opts).context("terminal-value barrier")
        }
        SolveKind::Impulse => {
            let delta = required(params.delta, "delta", "impulse")?;
            solvers::impulse_policy(bundle, delta, opts).context("impulse policy")
        }
    }
}

#[derive(Serialize)]
struct SolveArtifact {
    policy: PolicyResult,
    /// Barrier interval certified by the truncation bounds.
    certified_interval: Option<(f64, f64)>,
}

pub fn solve(cfg: &RunConfig, kind: SolveKind) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let opts = cfg.solver_options();
    let grid = cfg.grid.points()?;
    let dir = cfg.out_dir();
    let policy = solve_policy(&p.bundle(), cfg, kind, &opts)?;
    let certified_interval = match (&p.scales, kind) {
        (Scales::Truncated(t), SolveKind::Classic) => {
            solvers::classic_bounds(t, &opts).context("certified classic barrier")?.policy.level_interval
        }
        (Scales::Truncated(t), SolveKind::Bailout) => {
            let phi = required(cfg.solver.phi, "phi", "bailout")?;
            Some(solvers::bailout_bounds(t, phi, &opts).context("certified bail-out barrier")?)
        }
        _ => None,
    };
    let values: Vec<f64> = grid.iter().map(|&x| policy.value_fn.eval(x)).collect();
    write(dir, "value.csv", &columns_csv(&["value".into()], &grid, &[values]))?;
    write_json(dir, "policy.json", &SolveArtifact { policy, certified_interval })?;
    finish(&p, "solve", dir)
}

pub fn bounds(cfg: &RunConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let Scales::Truncated(t) = &p.scales else {
        return Err(CliError::Validation("bounds need a beta-family model; rational models are exact".into()));
    };
    let grid = cfg.grid.points()?;
    let dir = cfg.out_dir();
    write(dir, "bounds.csv", &t.to_csv(&grid))?;
    let certified = solvers::classic_bounds(t, &cfg.solver_options()).context("certified classic barrier")?;
    write_json(dir, "certified.json", &certified)?;
    finish(&p, "bounds", dir)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    betas: &'a [f64],
    depths: &'a [usize],
    barriers: &'a [f64],
    deltas: &'a [f64],
    value_sup_diffs: &'a [f64],
    scale_sup_diffs: &'a [f64],
    density_at_minus_one: &'a [f64],
    target_density_at_minus_one: f64,
    sup_diffs_decreasing: bool,
}

pub fn sweep_artifacts(dir: &Path, sweep: &solvers::CgmySweep) -> Result<(), CliError> {
    let headers: Vec<String> = sweep.betas.iter().map(|b| format!("u_beta_{b}")).collect();
    write(dir, "cgmy_values.csv", &columns_csv(&headers, &sweep.grid, &sweep.values))?;
    let summary = SweepSummary {
        betas: &sweep.betas,
        depths: &sweep.depths,
        barriers: &sweep.barriers,
        deltas: &sweep.deltas,
        value_sup_diffs: &sweep.value_sup_diffs,
        scale_sup_diffs: &sweep.scale_sup_diffs,
        density_at_minus_one: &sweep.density_at_minus_one,
        target_density_at_minus_one: sweep.target_density_at_minus_one,
        sup_diffs_decreasing: sweep.value_sup_diffs.windows(2).all(|d| d[1] < d[0]),
    };
    write_json(dir, "cgmy.json", &summary)
}

pub fn cgmy_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model.build()?;
    let JumpModel::CgmyTarget(target) = model.jumps() else {
        return Err(CliError::Validation("cgmy-sweep needs a model with cgmy_target jumps".into()));
    };
    let grid = cfg.grid.points()?;
    let sweep = solvers::cgmy_sweep(target, model.sigma(), model.drift(), cfg.q, &cfg.betas, cfg.m, &grid, &cfg.solver_options())
        .context("tempered-stable sweep")?;
    sweep_artifacts(cfg.out_dir(), &sweep)
}
