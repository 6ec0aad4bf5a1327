mod config;
mod error;
mod reproduce;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Grid, Overrides, RunConfig};
use error::CliError;
use run::SolveKind;

/// Scale functions and optimal dividend strategies for spectrally negative
/// Lévy models.
#[derive(Parser, Debug)]
#[command(name = "levyscale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Truncation depth for beta-family models.
    #[arg(long, global = true)]
    m: Option<usize>,

    /// Root-finding tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Evaluation grid as `x_min:x_max:step`.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<Grid>,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write W, W', W'' and Z on the grid.
    Scale,
    /// Write the Cramér-Lundberg roots and Wiener-Hopf weights.
    Roots,
    /// Solve one dividend problem.
    Solve {
        #[arg(value_enum)]
        kind: SolveKind,
    },
    /// Write the two-sided truncation bounds of a beta-family model.
    Bounds,
    /// Walk beta-family approximations of a tempered-stable target.
    CgmySweep,
    /// Regenerate a bundled experiment set.
    Reproduce {
        #[arg(value_parser = ["5.1", "5.2"])]
        section: String,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides { out: self.out.clone(), m: self.m, tol: self.tol, grid: self.grid }
    }

    fn config(&self) -> Result<RunConfig, CliError> {
        let path = self.config.as_deref().ok_or_else(|| CliError::Validation("--config is required".into()))?;
        RunConfig::load(path, &self.overrides())
    }
}

fn reproduce(cli: &Cli, section: &str) -> Result<(), CliError> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("reproduce-{section}")));
    let tol = cli.tol.unwrap_or(levy_scale::roots::DEFAULT_TOL);
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(CliError::Validation(format!("tol must lie in (0, 0.0001], got {tol}")));
    }
    match section {
        "5.1" => {
            let grid = cli.grid.unwrap_or(Grid { x_min: 0.0, x_max: 8.0, step: 0.01 });
            check_grid(&grid)?;
            reproduce::weibull(&out, &grid, tol)
        }
        _ => {
            let grid = cli.grid.unwrap_or(Grid { x_min: 0.0, x_max: 4.99, step: 0.01 });
            check_grid(&grid)?;
            reproduce::beta(&out, &grid)
        }
    }
}

fn check_grid(grid: &Grid) -> Result<(), CliError> {
    if grid.step > 0.0 && grid.x_max >= grid.x_min {
        Ok(())
    } else {
        Err(CliError::Validation(format!("bad grid {}:{}:{}", grid.x_min, grid.x_max, grid.step)))
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Scale => run::scale(&cli.config()?),
        Command::Roots => run::roots(&cli.config()?),
        Command::Solve { kind } => run::solve(&cli.config()?, *kind),
        Command::Bounds => run::bounds(&cli.config()?),
        Command::CgmySweep => run::cgmy_sweep(&cli.config()?),
        Command::Reproduce { section } => reproduce(cli, section),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
