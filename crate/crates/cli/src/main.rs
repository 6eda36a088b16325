use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use lowthrust_cli::config::MissionConfig;
use lowthrust_cli::pipeline::{run, Mode, Overrides};

/// Plan minimum-fuel low-thrust transfers between circular orbits, matching
/// altitude, inclination and the drifting node of the target plane.
#[derive(Parser)]
#[command(name = "lowthrust", version)]
struct Cli {
    /// Mission description (TOML)
    #[arg(short, long)]
    config: PathBuf,

    /// Solve level
    #[arg(long, value_enum, default_value_t = Mode::Ocp)]
    mode: Mode,

    /// Directory for the report and CSV artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Node winding branch override
    #[arg(long, conflicts_with = "scan_branches", allow_hyphen_values = true)]
    branch: Option<i32>,

    /// Scan winding branches over an inclusive range, e.g. -1..1
    #[arg(long, value_name = "LO..HI")]
    scan_branches: Option<String>,

    /// Integrator step override, days
    #[arg(long)]
    step: Option<f64>,

    /// Shooting tolerance override (scaled residual norm)
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_branch_range(text: &str) -> Result<(i32, i32)> {
    let (lo, hi) = text
        .split_once("..")
        .with_context(|| format!("expected LO..HI, got {text:?}"))?;
    let lo: i32 = lo.trim().parse().context("branch range start")?;
    let hi: i32 = hi.trim().parse().context("branch range end")?;
    if lo > hi {
        bail!("branch range {lo}..{hi} is empty");
    }
    Ok((lo, hi))
}

fn execute(cli: &Cli) -> Result<bool> {
    let config = MissionConfig::load(&cli.config)?;
    let overrides = Overrides {
        branch: cli.branch,
        scan_branches: cli
            .scan_branches
            .as_deref()
            .map(parse_branch_range)
            .transpose()?,
        step_day: cli.step,
        tolerance: cli.tol,
    };
    let outcome = run(&config, cli.mode, &cli.out, &overrides)?;
    print!("{}", outcome.report);
    Ok(outcome.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
