//! Solve pipeline behind the CLI: pick a mode, run the solvers, write the
//! report and CSV artifacts.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use lowthrust_core::edelbaum::EdelbaumTransfer;
use lowthrust_core::model::TransferProblem;
use lowthrust_core::propagator::write_trajectory_csv;
use lowthrust_core::sensitivity::sensitivity_report;
use lowthrust_core::ses::{
    scan_raan_branches, sequence_table, solve_ses_with, SesSolution,
};
use lowthrust_core::shooting::{solve_shooting, verify_extremal, ShootingUnknowns};
use lowthrust_core::singular::{
    critical_inclinations, write_accel_profile_csv, zero_node_adjoint_transfer, SingularFamily,
};
use lowthrust_core::units::{
    rad_per_s_to_deg_per_day, rad_to_deg, seconds_to_days, SECONDS_PER_DAY,
};

use crate::config::MissionConfig;
use crate::record::{self, SolutionRecord};
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Closed-form burn between the orbits, node angle left free
    Edelbaum,
    /// Burn-coast-burn with the drift orbit chosen to close the node gap
    Ses,
    /// Full optimality system solved by costate shooting
    Ocp,
    /// Intermediate-thrust profile and the zero-node-adjoint construction
    SingularAnalysis,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub branch: Option<i32>,
    pub scan_branches: Option<(i32, i32)>,
    pub step_day: Option<f64>,
    pub tolerance: Option<f64>,
}

pub struct Outcome {
    pub report: String,
    /// False when the requested solve fell back to a weaker answer.
    pub converged: bool,
    pub artifacts: Vec<PathBuf>,
}

pub fn run(
    config: &MissionConfig,
    mode: Mode,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Outcome> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let mut problem = config.problem()?;
    if let Some(branch) = overrides.branch {
        problem = problem.with_branch(branch);
    }
    let mut outcome = match mode {
        Mode::Edelbaum => run_edelbaum(&problem)?,
        Mode::Ses => run_ses(config, &problem, out_dir, overrides)?,
        Mode::Ocp => run_ocp(config, &problem, out_dir, overrides)?,
        Mode::SingularAnalysis => run_singular(config, &problem, out_dir)?,
    };
    let report_path = out_dir.join("report.txt");
    fs::write(&report_path, &outcome.report)
        .with_context(|| format!("writing {}", report_path.display()))?;
    outcome.artifacts.insert(0, report_path);
    Ok(outcome)
}

fn run_edelbaum(problem: &TransferProblem) -> Result<Outcome> {
    let burn = EdelbaumTransfer::new(
        problem.start.velocity,
        problem.start.inclination,
        problem.target.velocity,
        problem.target.inclination,
        problem.accel,
    )?;
    let mut s = report::mission_header(problem);
    let _ = writeln!(s, "closed-form transfer (node angle left free)");
    let _ = writeln!(s, "  delta-v        {:.3} m/s", burn.delta_v);
    let _ = writeln!(
        s,
        "  burn time      {:.3} days of the {:.3} day window",
        seconds_to_days(burn.duration),
        seconds_to_days(problem.window()),
    );
    let _ = writeln!(
        s,
        "  yaw            {:.3} deg at departure, {:.3} deg at arrival",
        rad_to_deg(burn.yaw_start),
        rad_to_deg(burn.yaw_end()),
    );
    Ok(Outcome {
        report: s,
        converged: true,
        artifacts: Vec::new(),
    })
}

/// Applies a branch scan when requested and returns the problem to solve
/// plus the scan summary for the report.
fn resolve_branch(
    problem: &TransferProblem,
    config: &MissionConfig,
    overrides: &Overrides,
) -> Result<(TransferProblem, String)> {
    let Some((lo, hi)) = overrides.scan_branches else {
        return Ok((*problem, String::new()));
    };
    let results = scan_raan_branches(problem, lo..=hi, &config.ses_options());
    let mut s = String::new();
    let _ = writeln!(s, "branch scan");
    let mut best: Option<(i32, f64)> = None;
    for r in &results {
        match &r.solution {
            Ok(sol) => {
                let _ = writeln!(
                    s,
                    "  branch {:>3}   delta-v {:9.3} m/s   drift {:8.4} deg/day",
                    r.branch,
                    sol.delta_v,
                    rad_per_s_to_deg_per_day(sol.drift_rate),
                );
                if best.map_or(true, |(_, dv)| sol.delta_v < dv) {
                    best = Some((r.branch, sol.delta_v));
                }
            }
            Err(err) => {
                let _ = writeln!(s, "  branch {:>3}   infeasible: {err}", r.branch);
            }
        }
    }
    let Some((branch, _)) = best else {
        bail!("no feasible node winding branch in {lo}..{hi}");
    };
    let _ = writeln!(s, "  selected branch {branch}");
    Ok((problem.with_branch(branch), s))
}

fn ses_sections(
    config: &MissionConfig,
    problem: &TransferProblem,
    solution: &SesSolution,
    out_dir: &Path,
) -> Result<(String, PathBuf)> {
    let mut s = String::new();
    let _ = writeln!(s, "split solution");
    let _ = writeln!(
        s,
        "  drift orbit    {:.1} m/s ({:.1} km), {:.5} deg inclination",
        solution.drift_velocity,
        problem
            .gravity
            .altitude_from_velocity(solution.drift_velocity)?
            / 1e3,
        rad_to_deg(solution.drift_inclination),
    );
    let _ = writeln!(
        s,
        "  node drift     {:.5} deg/day on the coast",
        rad_per_s_to_deg_per_day(solution.drift_rate),
    );
    let _ = writeln!(
        s,
        "  delta-v        {:.3} m/s ({:.3} + {:.3})",
        solution.delta_v, solution.delta_v1, solution.delta_v2,
    );
    if let Some(guess) = &solution.initial_guess {
        let _ = writeln!(
            s,
            "  seeded from    {:.1} m/s, {:.5} deg",
            guess.velocity,
            rad_to_deg(guess.inclination),
        );
    }
    let rows = sequence_table(problem, solution, &config.ses_options())?;
    let _ = write!(s, "{}", report::sequence_section(&rows));
    if let Some(budget) = config.budget() {
        let _ = write!(s, "{}", report::propellant_section(&budget, solution.delta_v)?);
    }
    let csv_path = out_dir.join("sequence.csv");
    let mut csv = BufWriter::new(
        File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?,
    );
    report::write_sequence_csv(&mut csv, &rows)?;
    Ok((s, csv_path))
}

fn run_ses(
    config: &MissionConfig,
    problem: &TransferProblem,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Outcome> {
    let (problem, scan_note) = resolve_branch(problem, config, overrides)?;
    let solution = solve_ses_with(&problem, &config.ses_options())?;
    let (sections, csv_path) = ses_sections(config, &problem, &solution, out_dir)?;
    let mut s = report::mission_header(&problem);
    let _ = write!(s, "{scan_note}{sections}");
    Ok(Outcome {
        report: s,
        converged: true,
        artifacts: vec![csv_path],
    })
}

fn run_ocp(
    config: &MissionConfig,
    problem: &TransferProblem,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Outcome> {
    let (problem, scan_note) = resolve_branch(problem, config, overrides)?;
    let ses = solve_ses_with(&problem, &config.ses_options())?;
    let sensitivity = sensitivity_report(&problem, &config.sensitivity_options())?;
    let seed = ShootingUnknowns::from_guess(&sensitivity.guess, ses.schedule.t1, ses.schedule.t2);

    let mut shooting = config.shooting_options();
    if let Some(step_day) = overrides.step_day {
        shooting.step = step_day * SECONDS_PER_DAY;
    }
    if let Some(tol) = overrides.tolerance {
        shooting.tol = tol;
    }

    let mut s = report::mission_header(&problem);
    let _ = write!(s, "{scan_note}");
    let _ = writeln!(s, "boundary sensitivities (split-solution differences)");
    let _ = writeln!(
        s,
        "  dJ/dv0 {:+.5}   dJ/di0 {:+.1} m/s/rad   dJ/dnode0 {:+.2} m/s/rad",
        sensitivity.guess.p_v0, sensitivity.guess.p_i0, sensitivity.guess.p_raan0,
    );
    let _ = writeln!(
        s,
        "  dJ/dt(arrival) {:+.4} m/s/day   dJ/dt(departure) {:+.4} m/s/day",
        sensitivity.dj_dtf * SECONDS_PER_DAY,
        sensitivity.dj_dt0 * SECONDS_PER_DAY,
    );

    match solve_shooting(&problem, &seed, &shooting) {
        Ok(solution) => {
            let certificate = verify_extremal(&problem, &solution);
            let _ = writeln!(
                s,
                "converged in {} iterations, scaled residual {:.2e}",
                solution.iterations, solution.scaled_norm,
            );
            let _ = writeln!(
                s,
                "  costates       p_v0 {:+.5}   p_i0 {:+.2}   p_raan0 {:+.3}",
                solution.unknowns.p_v0, solution.unknowns.p_i0, solution.unknowns.p_raan0,
            );
            let _ = writeln!(
                s,
                "  switch times   {:.5} and {:.5} days",
                seconds_to_days(solution.schedule.t1),
                seconds_to_days(solution.schedule.t2),
            );
            let _ = writeln!(s, "  delta-v        {:.4} m/s", solution.delta_v);
            if solution.boundary {
                let _ = writeln!(s, "  note           a switch sits on the window edge");
            }
            let _ = write!(s, "{}", report::sequence_section(&solution.sequence));
            if let Some(budget) = config.budget() {
                let _ = write!(s, "{}", report::propellant_section(&budget, solution.delta_v)?);
            }
            let _ = write!(s, "{}", report::certificate_section(&certificate));

            let record = SolutionRecord::new(&problem, &solution);
            let miss = record.verify(config.gravity()?)?;
            let record_path = out_dir.join("solution.toml");
            record::write_toml(&record_path, &record)?;
            let _ = writeln!(
                s,
                "record      {} (re-flown, endpoint miss {:.2e})",
                record_path.display(),
                miss
            );

            let trajectory_path = out_dir.join("trajectory.csv");
            let mut traj = BufWriter::new(
                File::create(&trajectory_path)
                    .with_context(|| format!("creating {}", trajectory_path.display()))?,
            );
            write_trajectory_csv(&mut traj, &solution.trajectory, &problem.gravity)?;
            let sequence_path = out_dir.join("sequence.csv");
            let mut csv = BufWriter::new(
                File::create(&sequence_path)
                    .with_context(|| format!("creating {}", sequence_path.display()))?,
            );
            report::write_sequence_csv(&mut csv, &solution.sequence)?;

            Ok(Outcome {
                report: s,
                converged: certificate.is_extremal(),
                artifacts: vec![record_path, trajectory_path, sequence_path],
            })
        }
        Err(err) => {
            let _ = writeln!(s, "shooting failed: {err}");
            let _ = writeln!(s, "falling back to the split solution");
            let (sections, csv_path) = ses_sections(config, &problem, &ses, out_dir)?;
            let _ = write!(s, "{sections}");
            Ok(Outcome {
                report: s,
                converged: false,
                artifacts: vec![csv_path],
            })
        }
    }
}

fn run_singular(
    config: &MissionConfig,
    problem: &TransferProblem,
    out_dir: &Path,
) -> Result<Outcome> {
    let family = config.singular_family();
    let angles = critical_inclinations();
    let mut s = report::mission_header(problem);
    let _ = writeln!(s, "intermediate-thrust structure");
    let _ = writeln!(
        s,
        "  steering law   tan(yaw) tan(inc) = {:.6}",
        lowthrust_core::singular::SINGULAR_TAN_PRODUCT,
    );
    let _ = writeln!(
        s,
        "  positive band  {:.4} to {:.4} deg (open at 90)",
        rad_to_deg(angles.band_low),
        rad_to_deg(angles.band_high),
    );
    let _ = writeln!(
        s,
        "  profile troughs {:.4} and {:.4} deg",
        rad_to_deg(angles.trough_low),
        rad_to_deg(angles.trough_high),
    );
    let _ = writeln!(
        s,
        "  family         costate-rate product {:+.4}, p0 {:+.4}",
        family.costate_rate_product, family.p0,
    );
    let _ = writeln!(
        s,
        "  p0 grazing the troughs {:+.4}, grazing the 0/180 limits {:+.4}",
        SingularFamily::p0_grazing_troughs(problem.accel),
        SingularFamily::p0_grazing_limits(problem.accel),
    );

    let profile_path = out_dir.join("accel_profile.csv");
    let mut csv = BufWriter::new(
        File::create(&profile_path)
            .with_context(|| format!("creating {}", profile_path.display()))?,
    );
    write_accel_profile_csv(&mut csv, &family, 2000)?;

    match zero_node_adjoint_transfer(problem, config.ses_options().quadrature_intervals) {
        Ok(split) => {
            let _ = writeln!(s, "zero-node-adjoint construction");
            let _ = writeln!(
                s,
                "  burn {:.3} days, coast {:.3} days inserted after {:.3} burn days",
                seconds_to_days(split.burn.duration),
                seconds_to_days(split.coast_duration),
                seconds_to_days(split.split_elapsed),
            );
            let _ = writeln!(
                s,
                "  delta-v {:.3} m/s at any thrust level, final node {:.3} deg",
                split.delta_v,
                rad_to_deg(split.final_raan),
            );
        }
        Err(err) => {
            let _ = writeln!(s, "zero-node-adjoint construction not available: {err}");
        }
    }
    Ok(Outcome {
        report: s,
        converged: true,
        artifacts: vec![profile_path],
    })
}
