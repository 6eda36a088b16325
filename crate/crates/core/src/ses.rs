//! Split-Edelbaum scheme: a burn-coast-burn construction that meets a target
//! plane whose node keeps drifting.
//!
//! The transfer is split into two closed-form burns joined by a long coast on
//! an intermediate "drift" orbit `(v_d, i_d)` chosen so that the node motion
//! accumulated over the whole mission lands exactly on the target node at the
//! final time. That reduces the problem to two scalars:
//!
//! - inner: for a trial `v_d`, root-solve `i_d` so the node constraint holds
//!   (node drift across each burn is integrated by quadrature over the
//!   closed-form burn path, the coast contributes rate times duration);
//! - outer: minimize total delta-v over `v_d` within altitude bounds.
//!
//! The construction is not an extremal of the full optimality system, but it
//! lands close enough to seed the shooting solver, and its cost is typically
//! within a fraction of a percent of optimal.

use crate::edelbaum::EdelbaumTransfer;
use crate::error::{Error, Result};
use crate::model::{GravityModel, SequenceRow, TransferProblem};
use crate::propagator::ThrustSchedule;
use crate::solvers::{bracket_sign_change, brent_min, brent_root, simpson};
use crate::units::SECONDS_PER_DAY;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct SesOptions {
    /// Simpson panels for the node-drift integral across each burn.
    pub quadrature_intervals: usize,
    /// Altitude range the drift orbit may use, meters.
    pub drift_altitude_bounds: (f64, f64),
    /// How far beyond the endpoint inclinations the drift inclination may
    /// wander, radians.
    pub inclination_margin: f64,
    /// Brent tolerance on the drift velocity, m/s.
    pub outer_tol: f64,
    /// Brent tolerance on the drift inclination, rad.
    pub inner_tol: f64,
    pub max_iter: usize,
}

impl Default for SesOptions {
    fn default() -> Self {
        Self {
            quadrature_intervals: 64,
            drift_altitude_bounds: (150e3, 2000e3),
            inclination_margin: 20f64.to_radians(),
            outer_tol: 1e-10,
            inner_tol: 1e-12,
            max_iter: 100,
        }
    }
}

/// Analytic seed for the drift orbit (impulsive-burn approximation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftGuess {
    pub velocity: f64,
    pub inclination: f64,
}

/// Drift orbit, schedule, and costs of a converged split-Edelbaum transfer.
#[derive(Debug, Clone)]
pub struct SesSolution {
    pub drift_velocity: f64,
    pub drift_inclination: f64,
    pub schedule: ThrustSchedule,
    pub delta_v1: f64,
    pub delta_v2: f64,
    pub delta_v: f64,
    /// Node constraint residual after the inner solve, rad.
    pub raan_residual: f64,
    /// Node rate on the drift orbit, rad/s.
    pub drift_rate: f64,
    /// Where the analytic seed would have started the search, if it exists.
    pub initial_guess: Option<DriftGuess>,
}

fn burn_legs(
    problem: &TransferProblem,
    drift_velocity: f64,
    drift_inclination: f64,
) -> Result<(EdelbaumTransfer, EdelbaumTransfer)> {
    let to_drift = EdelbaumTransfer::new(
        problem.start.velocity,
        problem.start.inclination,
        drift_velocity,
        drift_inclination,
        problem.accel,
    )?;
    let to_target = EdelbaumTransfer::new(
        drift_velocity,
        drift_inclination,
        problem.target.velocity,
        problem.target.inclination,
        problem.accel,
    )?;
    Ok((to_drift, to_target))
}

/// Node angle swept during one closed-form burn.
fn leg_raan_drift(burn: &EdelbaumTransfer, gravity: &GravityModel, intervals: usize) -> Result<f64> {
    let k = gravity.drift_constant();
    simpson(
        |t| {
            let p = burn.state_at(t);
            Ok(-k * p.velocity.powi(7) * p.inclination.cos())
        },
        0.0,
        burn.duration,
        intervals,
    )
}

/// Final node angle and the event schedule for a trial drift orbit.
pub fn raan_at_tf(
    problem: &TransferProblem,
    drift_velocity: f64,
    drift_inclination: f64,
    options: &SesOptions,
) -> Result<(f64, ThrustSchedule)> {
    let (to_drift, to_target) = burn_legs(problem, drift_velocity, drift_inclination)?;
    let t0 = problem.start.epoch;
    let tf = problem.target.epoch;
    let t1 = t0 + to_drift.duration;
    let t2 = tf - to_target.duration;
    if t2 < t1 {
        return Err(Error::Infeasible(format!(
            "window of {:.3} days cannot hold {:.3} days of burn time",
            (tf - t0) / SECONDS_PER_DAY,
            (to_drift.duration + to_target.duration) / SECONDS_PER_DAY,
        )));
    }
    let drift_rate = problem
        .gravity
        .raan_rate(drift_velocity, drift_inclination);
    let raan = problem.start.raan
        + leg_raan_drift(&to_drift, &problem.gravity, options.quadrature_intervals)?
        + drift_rate * (t2 - t1)
        + leg_raan_drift(&to_target, &problem.gravity, options.quadrature_intervals)?;
    Ok((raan, ThrustSchedule { t0, t1, t2, tf }))
}

fn inclination_scan_range(problem: &TransferProblem, options: &SesOptions) -> (f64, f64) {
    let lo = problem
        .start
        .inclination
        .min(problem.target.inclination)
        - options.inclination_margin;
    let hi = problem
        .start
        .inclination
        .max(problem.target.inclination)
        + options.inclination_margin;
    (lo.max(0.01), hi.min(std::f64::consts::PI - 0.01))
}

/// Inner solve: the drift inclination that closes the node constraint for a
/// given drift velocity.
fn drift_inclination_for(
    problem: &TransferProblem,
    drift_velocity: f64,
    options: &SesOptions,
) -> Result<f64> {
    let target = problem.effective_target_raan(problem.target.epoch);
    let (lo, hi) = inclination_scan_range(problem, options);
    let miss = |inc: f64| Ok(raan_at_tf(problem, drift_velocity, inc, options)?.0 - target);
    let (blo, bhi) = bracket_sign_change(miss, lo, hi, 40, "drift-inclination node constraint")?;
    brent_root(
        miss,
        blo,
        bhi,
        options.inner_tol,
        options.max_iter,
        "drift-inclination node constraint",
    )
}

fn drift_velocity_bounds(problem: &TransferProblem, options: &SesOptions) -> Result<(f64, f64)> {
    let (alt_lo, alt_hi) = options.drift_altitude_bounds;
    Ok((
        problem.gravity.velocity_from_altitude(alt_hi)?,
        problem.gravity.velocity_from_altitude(alt_lo)?,
    ))
}

/// Analytic starting point for the drift-orbit search.
///
/// Treats both burns as instantaneous, so the coast spans the whole window
/// and the drift rate must average the full node change. That ties `i_d` to
/// `v_d`; stationarity of total cost along that one-parameter family is a
/// scalar root problem in `v_d`.
pub fn ses_initial_guess(problem: &TransferProblem, options: &SesOptions) -> Result<DriftGuess> {
    let window = problem.window();
    let rate_req = (problem.effective_target_raan(problem.target.epoch) - problem.start.raan)
        / window;
    let k = problem.gravity.drift_constant();
    let iso_inclination = |v: f64| -> Result<f64> {
        let c = -rate_req / (k * v.powi(7));
        if c.abs() >= 1.0 {
            return Err(Error::Infeasible(format!(
                "no inclination drifts the node at {rate_req:.3e} rad/s for v = {v:.1} m/s"
            )));
        }
        Ok(c.acos())
    };
    let cost_slope = |v: f64| -> Result<f64> {
        let inc = iso_inclination(v)?;
        let (to_drift, to_target) = burn_legs(problem, v, inc)?;
        let arrive = to_drift.endpoint_gradient()?;
        let leave = to_target.endpoint_gradient()?;
        let dv = arrive.wrt_v_end + leave.wrt_v_start;
        let di = arrive.wrt_inc_end + leave.wrt_inc_start;
        // di_d/dv_d along the fixed-rate family.
        Ok(dv + di * 7.0 / (v * inc.tan()))
    };
    let (v_lo, v_hi) = drift_velocity_bounds(problem, options)?;
    let (blo, bhi) = bracket_sign_change(cost_slope, v_lo, v_hi, 40, "drift-velocity seed")?;
    let velocity = brent_root(
        cost_slope,
        blo,
        bhi,
        1e-6,
        options.max_iter,
        "drift-velocity seed",
    )?;
    Ok(DriftGuess {
        velocity,
        inclination: iso_inclination(velocity)?,
    })
}

pub fn solve_ses(problem: &TransferProblem) -> Result<SesSolution> {
    solve_ses_with(problem, &SesOptions::default())
}

pub fn solve_ses_with(problem: &TransferProblem, options: &SesOptions) -> Result<SesSolution> {
    let (v_lo, v_hi) = drift_velocity_bounds(problem, options)?;
    let total_cost = |v: f64| -> Result<f64> {
        let inc = drift_inclination_for(problem, v, options)?;
        let (to_drift, to_target) = burn_legs(problem, v, inc)?;
        Ok(to_drift.delta_v + to_target.delta_v)
    };
    let (drift_velocity, _) = brent_min(
        total_cost,
        v_lo,
        v_hi,
        options.outer_tol,
        options.max_iter,
        "drift-velocity cost",
    )?;
    let drift_inclination = drift_inclination_for(problem, drift_velocity, options)?;
    let (raan, schedule) = raan_at_tf(problem, drift_velocity, drift_inclination, options)?;
    let (to_drift, to_target) = burn_legs(problem, drift_velocity, drift_inclination)?;
    Ok(SesSolution {
        drift_velocity,
        drift_inclination,
        schedule,
        delta_v1: to_drift.delta_v,
        delta_v2: to_target.delta_v,
        delta_v: to_drift.delta_v + to_target.delta_v,
        raan_residual: raan - problem.effective_target_raan(problem.target.epoch),
        drift_rate: problem.gravity.raan_rate(drift_velocity, drift_inclination),
        initial_guess: ses_initial_guess(problem, options).ok(),
    })
}

/// Outcome of solving one node-winding branch.
#[derive(Debug)]
pub struct BranchResult {
    pub branch: i32,
    pub solution: Result<SesSolution>,
}

/// Solves every requested winding branch (data-parallel when the `parallel`
/// feature is enabled).
#[cfg(feature = "parallel")]
pub fn scan_raan_branches(
    problem: &TransferProblem,
    branches: impl IntoIterator<Item = i32>,
    options: &SesOptions,
) -> Vec<BranchResult> {
    let list: Vec<i32> = branches.into_iter().collect();
    list.into_par_iter()
        .map(|branch| BranchResult {
            branch,
            solution: solve_ses_with(&problem.with_branch(branch), options),
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn scan_raan_branches(
    problem: &TransferProblem,
    branches: impl IntoIterator<Item = i32>,
    options: &SesOptions,
) -> Vec<BranchResult> {
    scan_raan_branches_seq(problem, branches, options)
}

/// Sequential fallback of [`scan_raan_branches`], available unconditionally
/// so the two can be benchmarked against each other.
pub fn scan_raan_branches_seq(
    problem: &TransferProblem,
    branches: impl IntoIterator<Item = i32>,
    options: &SesOptions,
) -> Vec<BranchResult> {
    branches
        .into_iter()
        .map(|branch| BranchResult {
            branch,
            solution: solve_ses_with(&problem.with_branch(branch), options),
        })
        .collect()
}

/// Four-event mission table for a solved transfer.
pub fn sequence_table(
    problem: &TransferProblem,
    solution: &SesSolution,
    options: &SesOptions,
) -> Result<Vec<SequenceRow>> {
    let gravity = &problem.gravity;
    let (to_drift, to_target) =
        burn_legs(problem, solution.drift_velocity, solution.drift_inclination)?;
    let s = &solution.schedule;

    let depart = problem.start;
    let mut enter_drift = crate::model::OrbitState::new(
        solution.drift_velocity,
        solution.drift_inclination,
        depart.raan + leg_raan_drift(&to_drift, gravity, options.quadrature_intervals)?,
        s.t1,
    );
    let leave_drift = enter_drift.coasted_to(gravity, s.t2);
    enter_drift.epoch = s.t1;
    let arrive = crate::model::OrbitState::new(
        problem.target.velocity,
        problem.target.inclination,
        leave_drift.raan + leg_raan_drift(&to_target, gravity, options.quadrature_intervals)?,
        s.tf,
    );

    Ok(vec![
        SequenceRow::from_state("depart initial orbit", &depart, gravity, 0.0),
        SequenceRow::from_state("enter drift orbit", &enter_drift, gravity, solution.delta_v1),
        SequenceRow::from_state("leave drift orbit", &leave_drift, gravity, 0.0),
        SequenceRow::from_state("arrive target orbit", &arrive, gravity, solution.delta_v2),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OrbitState;
    use crate::units::{days_to_seconds, deg_to_rad, rad_per_s_to_deg_per_day};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn mission() -> TransferProblem {
        let earth = GravityModel::earth();
        let start = OrbitState::from_altitude(&earth, 800e3, deg_to_rad(98.0), 0.0, 0.0).unwrap();
        let target = OrbitState::from_altitude(
            &earth,
            900e3,
            deg_to_rad(99.0),
            deg_to_rad(30.0),
            0.0,
        )
        .unwrap()
        .coasted_to(&earth, days_to_seconds(100.0));
        TransferProblem::new(start, target, 3.5e-3, earth).unwrap()
    }

    #[test]
    fn node_constraint_closes() {
        let problem = mission();
        let options = SesOptions::default();
        let sol = solve_ses_with(&problem, &options).unwrap();
        assert!(sol.raan_residual.abs() < 1e-9, "residual {}", sol.raan_residual);
        // Re-evaluating from the stored drift orbit reproduces the target.
        let (raan, schedule) =
            raan_at_tf(&problem, sol.drift_velocity, sol.drift_inclination, &options).unwrap();
        assert_relative_eq!(
            raan,
            problem.effective_target_raan(problem.target.epoch),
            max_relative = 1e-9
        );
        assert_eq!(schedule, sol.schedule);
    }

    #[test]
    fn mission_numbers_are_plausible() {
        let problem = mission();
        let sol = solve_ses(&problem).unwrap();
        // Drift orbit below the endpoints (faster), inclination beyond both.
        assert!(sol.drift_velocity > problem.start.velocity);
        assert!(sol.drift_inclination > problem.target.inclination);
        assert!((550.0..650.0).contains(&sol.delta_v), "delta-v {}", sol.delta_v);
        let rate = rad_per_s_to_deg_per_day(sol.drift_rate);
        assert!((1.2..1.4).contains(&rate), "drift rate {rate} deg/day");
        // Burn durations consistent with the schedule.
        assert_relative_eq!(
            sol.schedule.t1 - sol.schedule.t0,
            sol.delta_v1 / problem.accel,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            sol.schedule.tf - sol.schedule.t2,
            sol.delta_v2 / problem.accel,
            max_relative = 1e-12
        );
    }

    #[test]
    fn optimum_beats_neighbors() {
        let problem = mission();
        let options = SesOptions::default();
        let sol = solve_ses_with(&problem, &options).unwrap();
        let cost_at = |v: f64| {
            let inc = drift_inclination_for(&problem, v, &options).unwrap();
            let (a, b) = burn_legs(&problem, v, inc).unwrap();
            a.delta_v + b.delta_v
        };
        assert!(sol.delta_v <= cost_at(sol.drift_velocity - 50.0) + 1e-9);
        assert!(sol.delta_v <= cost_at(sol.drift_velocity + 50.0) + 1e-9);
    }

    #[test]
    fn seed_lands_near_optimum() {
        let problem = mission();
        let sol = solve_ses(&problem).unwrap();
        let guess = sol.initial_guess.expect("seed exists for this mission");
        assert!(
            (guess.velocity - sol.drift_velocity).abs() < 100.0,
            "seed velocity {} vs optimum {}",
            guess.velocity,
            sol.drift_velocity
        );
        assert!((guess.inclination - sol.drift_inclination).abs() < deg_to_rad(1.0));
    }

    #[test]
    fn winding_branches_beyond_reach_fail() {
        let problem = mission();
        let results = scan_raan_branches_seq(&problem, -1..=1, &SesOptions::default());
        assert_eq!(results.len(), 3);
        assert!(results[0].solution.is_err(), "branch -1 needs a retrograde rate");
        assert!(results[1].solution.is_ok());
        assert!(results[2].solution.is_err(), "branch +1 needs an extra revolution");
        let parallel = scan_raan_branches(&problem, -1..=1, &SesOptions::default());
        for (a, b) in results.iter().zip(parallel.iter()) {
            assert_eq!(a.branch, b.branch);
            assert_eq!(a.solution.is_ok(), b.solution.is_ok());
            if let (Ok(x), Ok(y)) = (&a.solution, &b.solution) {
                assert_eq!(x.drift_velocity, y.drift_velocity);
            }
        }
    }

    #[test]
    fn too_short_window_is_infeasible() {
        let earth = GravityModel::earth();
        let start = OrbitState::from_altitude(&earth, 800e3, deg_to_rad(98.0), 0.0, 0.0).unwrap();
        let target = OrbitState::from_altitude(
            &earth,
            900e3,
            deg_to_rad(99.0),
            deg_to_rad(30.0),
            0.0,
        )
        .unwrap()
        .coasted_to(&earth, days_to_seconds(0.5));
        let problem = TransferProblem::new(start, target, 3.5e-3, earth).unwrap();
        assert!(solve_ses(&problem).is_err());
    }

    #[test]
    fn sequence_table_tracks_events() {
        let problem = mission();
        let options = SesOptions::default();
        let sol = solve_ses_with(&problem, &options).unwrap();
        let rows = sequence_table(&problem, &sol, &options).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].time_day, 0.0);
        assert_relative_eq!(rows[3].time_day, 100.0, max_relative = 1e-12);
        assert_abs_diff_eq!(
            rows[3].raan_deg,
            problem
                .effective_target_raan(problem.target.epoch)
                .to_degrees(),
            epsilon = 1e-6
        );
        assert_relative_eq!(rows[1].impulse, sol.delta_v1);
        assert_relative_eq!(rows[3].impulse, sol.delta_v2);
        // The drift rows share the drift orbit.
        assert_eq!(rows[1].velocity, rows[2].velocity);
        assert_eq!(rows[1].inclination_deg, rows[2].inclination_deg);
    }
}
