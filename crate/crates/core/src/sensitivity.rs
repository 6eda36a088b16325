//! Finite-difference sensitivities of the transfer cost, used to seed the
//! adjoints of the shooting solver.
//!
//! Each boundary value of the mission is nudged both ways, the split-Edelbaum
//! transfer is re-solved, and a central difference estimates the gradient of
//! the minimum delta-v. In the adjoint convention used by [`crate::propagator`]
//! those gradients are exactly the initial costates, so a handful of solves
//! turns the heuristic into a starting point for the exact optimality system.
//!
//! The solves for the individual perturbations are independent and run
//! data-parallel when the `parallel` feature is enabled.

use crate::error::Result;
use crate::model::{OrbitState, TransferProblem};
use crate::propagator::Costate;
use crate::ses::{solve_ses_with, SesOptions};
use crate::units::{days_to_seconds, deg_to_rad, km_to_m};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Step sizes for the central differences.
#[derive(Debug, Clone, Copy)]
pub struct Perturbations {
    /// Start-altitude step, m (mapped onto a velocity step).
    pub altitude: f64,
    /// Start-inclination step, rad.
    pub inclination: f64,
    /// Start-node step, rad.
    pub raan: f64,
    /// Date step for the window edges, s.
    pub date: f64,
}

impl Default for Perturbations {
    fn default() -> Self {
        Self {
            altitude: km_to_m(50.0),
            inclination: deg_to_rad(0.1),
            raan: deg_to_rad(5.0),
            date: days_to_seconds(5.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SensitivityOptions {
    pub perturbations: Perturbations,
    pub ses: SesOptions,
}

/// Cost gradient at the start of the window, in the adjoint convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostateGuess {
    pub p_v0: f64,
    /// m/s per rad.
    pub p_i0: f64,
    /// m/s per rad.
    pub p_raan0: f64,
    /// Estimated motion invariant `-dJ/dtf + p_raan * target rate`, m/s per s.
    pub hamiltonian: f64,
}

impl CostateGuess {
    pub fn costate(&self) -> Costate {
        Costate::new(self.p_v0, self.p_i0, self.p_raan0)
    }
}

fn batch_costs(problems: &[TransferProblem], options: &SesOptions, parallel: bool) -> Result<Vec<f64>> {
    let solve = |p: &TransferProblem| solve_ses_with(p, options).map(|s| s.delta_v);
    #[cfg(feature = "parallel")]
    if parallel {
        return problems.par_iter().map(solve).collect();
    }
    let _ = parallel;
    problems.iter().map(solve).collect()
}

fn with_start(problem: &TransferProblem, start: OrbitState) -> TransferProblem {
    TransferProblem { start, ..*problem }
}

fn perturbed_problems(
    problem: &TransferProblem,
    steps: &Perturbations,
) -> Result<(Vec<TransferProblem>, f64, f64)> {
    let gravity = &problem.gravity;
    let s = problem.start;
    let alt = s.altitude(gravity);
    let v_up = gravity.velocity_from_altitude(alt + steps.altitude)?;
    let v_down = gravity.velocity_from_altitude(alt - steps.altitude)?;
    let tf = problem.target.epoch;
    let problems = vec![
        with_start(problem, OrbitState { velocity: v_up, ..s }),
        with_start(problem, OrbitState { velocity: v_down, ..s }),
        with_start(problem, OrbitState { inclination: s.inclination + steps.inclination, ..s }),
        with_start(problem, OrbitState { inclination: s.inclination - steps.inclination, ..s }),
        with_start(problem, OrbitState { raan: s.raan + steps.raan, ..s }),
        with_start(problem, OrbitState { raan: s.raan - steps.raan, ..s }),
        TransferProblem {
            target: problem.target.coasted_to(gravity, tf + steps.date),
            ..*problem
        },
        TransferProblem {
            target: problem.target.coasted_to(gravity, tf - steps.date),
            ..*problem
        },
    ];
    Ok((problems, v_up, v_down))
}

fn assemble(
    problem: &TransferProblem,
    steps: &Perturbations,
    costs: &[f64],
    v_up: f64,
    v_down: f64,
) -> CostateGuess {
    let p_v0 = (costs[0] - costs[1]) / (v_up - v_down);
    let p_i0 = (costs[2] - costs[3]) / (2.0 * steps.inclination);
    let p_raan0 = (costs[4] - costs[5]) / (2.0 * steps.raan);
    let dj_dtf = (costs[6] - costs[7]) / (2.0 * steps.date);
    let target_rate = problem.target.raan_rate(&problem.gravity);
    CostateGuess {
        p_v0,
        p_i0,
        p_raan0,
        hamiltonian: -dj_dtf + p_raan0 * target_rate,
    }
}

pub fn estimate_costates(
    problem: &TransferProblem,
    options: &SensitivityOptions,
) -> Result<CostateGuess> {
    let (problems, v_up, v_down) = perturbed_problems(problem, &options.perturbations)?;
    let costs = batch_costs(&problems, &options.ses, true)?;
    Ok(assemble(problem, &options.perturbations, &costs, v_up, v_down))
}

/// Sequential twin of [`estimate_costates`], kept unconditionally for
/// benchmarking the parallel dispatch against it.
pub fn estimate_costates_seq(
    problem: &TransferProblem,
    options: &SensitivityOptions,
) -> Result<CostateGuess> {
    let (problems, v_up, v_down) = perturbed_problems(problem, &options.perturbations)?;
    let costs = batch_costs(&problems, &options.ses, false)?;
    Ok(assemble(problem, &options.perturbations, &costs, v_up, v_down))
}

/// Central-difference slope of the cost with respect to the departure date,
/// with the start orbit drifting naturally while it waits. Non-negative for
/// a well-posed window: waiting never helps.
pub fn cost_slope_wrt_start_date(
    problem: &TransferProblem,
    options: &SensitivityOptions,
) -> Result<f64> {
    let dt = options.perturbations.date;
    let gravity = problem.gravity;
    let later = with_start(
        problem,
        problem.start.coasted_to(&gravity, problem.start.epoch + dt),
    );
    let earlier = with_start(
        problem,
        problem.start.coasted_to(&gravity, problem.start.epoch - dt),
    );
    let costs = batch_costs(&[later, earlier], &options.ses, true)?;
    Ok((costs[0] - costs[1]) / (2.0 * dt))
}

/// Everything the sensitivity analysis produces, for reporting.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityReport {
    /// Unperturbed transfer cost, m/s.
    pub baseline_delta_v: f64,
    pub guess: CostateGuess,
    /// dJ/d(final date), m/s per s.
    pub dj_dtf: f64,
    /// dJ/d(start date), m/s per s.
    pub dj_dt0: f64,
}

pub fn sensitivity_report(
    problem: &TransferProblem,
    options: &SensitivityOptions,
) -> Result<SensitivityReport> {
    let baseline = solve_ses_with(problem, &options.ses)?.delta_v;
    let guess = estimate_costates(problem, options)?;
    let dj_dt0 = cost_slope_wrt_start_date(problem, options)?;
    let target_rate = problem.target.raan_rate(&problem.gravity);
    let dj_dtf = -(guess.hamiltonian - guess.p_raan0 * target_rate);
    Ok(SensitivityReport {
        baseline_delta_v: baseline,
        guess,
        dj_dtf,
        dj_dt0,
    })
}
