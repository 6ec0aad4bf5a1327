use std::path::{Path, PathBuf};
use std::str::FromStr;

use levy_scale::SpectralModel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const MAX_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ModelSpec {
    /// A bundled jump fit with a chosen Gaussian part and drift.
    Fixture { fixture: String, sigma: f64, drift: f64 },
    Explicit(SpectralModel),
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpectralModel, CliError> {
        match self {
            ModelSpec::Explicit(m) => Ok(m.clone()),
            ModelSpec::Fixture { fixture, sigma, drift } => match fixture.as_str() {
                "weibull" => Ok(levy_scale::weibull_model(*sigma, *drift)?),
                other => Err(CliError::Validation(format!("unknown fixture {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { x_min: 0.0, x_max: 3.0, step: 0.01 }
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `a:b:step`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(format!("expected a:b:step, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Grid { x_min: num(a)?, x_max: num(b)?, step: num(step)? })
    }
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        Ok(levy_scale::scale::grid(self.x_min, self.x_max, self.step)?)
    }
}

/// Parameters for the four dividend problems; each verb reads the ones it
/// needs.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    /// Capital-injection cost for the bail-out problem.
    pub phi: Option<f64>,
    /// Terminal payoff at ruin.
    #[serde(rename = "S")]
    pub s: Option<f64>,
    /// Terminal payoff per unit of deficit.
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Fixed cost per impulse payment.
    pub delta: Option<f64>,
    pub horizon: Option<f64>,
}

fn default_m() -> usize {
    150
}

fn default_tol() -> f64 {
    levy_scale::roots::DEFAULT_TOL
}

fn default_betas() -> Vec<f64> {
    vec![1.0, 0.5, 0.25, 0.125]
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub q: f64,
    #[serde(default)]
    pub solver: SolverParams,
    /// Truncation depth for meromorphic models.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// `β` sequence for the tempered-stable sweep.
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub grid: Option<Grid>,
}

impl RunConfig {
    pub fn load(path: &Path, over: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        cfg.apply(over);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, over: &Overrides) {
        if let Some(out) = &over.out {
            self.out = Some(out.clone());
        }
        if let Some(m) = over.m {
            self.m = m;
        }
        if let Some(tol) = over.tol {
            self.tol = tol;
        }
        if let Some(grid) = over.grid {
            self.grid = grid;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(self.grid.step > 0.0) {
            return bad(format!("grid step must be positive, got {}", self.grid.step));
        }
        if !(self.grid.x_max >= self.grid.x_min) || !self.grid.x_min.is_finite() || !self.grid.x_max.is_finite() {
            return bad(format!("grid [{}, {}] is empty or unbounded", self.grid.x_min, self.grid.x_max));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return bad(format!("tol must lie in (0, {MAX_TOL}], got {}", self.tol));
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return bad(format!("q must be positive, got {}", self.q));
        }
        if self.out.is_none() {
            return bad("no output directory: set \"out\" in the config or pass --out".into());
        }
        Ok(())
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().expect("validated")
    }

    pub fn solver_options(&self) -> levy_scale::SolverOptions {
        let mut opts = levy_scale::SolverOptions::default();
        if let Some(h) = self.solver.horizon {
            opts.horizon = h;
        }
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        serde_json::from_str(
            r#"{"model": {"fixture": "weibull", "sigma": 0.2, "drift": 0.1}, "q": 0.03, "out": "o"}"#,
        )
        .unwrap()
    }

    #[test]
    fn grid_parses_triples() {
        let g: Grid = "0:2.5:0.05".parse().unwrap();
        assert_eq!(g, Grid { x_min: 0.0, x_max: 2.5, step: 0.05 });
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:x:0.1".parse::<Grid>().is_err());
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = base();
        cfg.validate().unwrap();
        assert_eq!(cfg.m, 150);
        assert_eq!(cfg.betas.len(), 4);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = base();
        cfg.grid.step = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.tol = 1e-3;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.m = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.out = None;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = base();
        cfg.apply(&Overrides { m: Some(15), tol: Some(1e-9), grid: Some("0:1:0.5".parse().unwrap()), out: None });
        assert_eq!((cfg.m, cfg.tol, cfg.grid.x_max), (15, 1e-9, 1.0));
    }

    #[test]
    fn explicit_model_parses() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"model": {"sigma": 0.2, "drift": 0.1,
                "jumps": {"type": "beta_family", "c": 0.1, "alpha": 3.0, "beta": 1.0, "shape": 1.5}},
                "q": 0.03, "out": "o"}"#,
        )
        .unwrap();
        assert!(!cfg.model.build().unwrap().is_finite());
    }
}
