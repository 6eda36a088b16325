//! Newton shooting for the full optimality system.
//!
//! Unknowns: the three initial adjoints and the two switch times of a
//! burn-coast-burn schedule. Residuals: the three terminal state errors
//! against the drifting target plane, plus the switching value at each switch
//! (thrust must be exactly marginal where it turns on or off). The window
//! ends `t0` and `tf` stay fixed.
//!
//! The Jacobian comes from forward differences in scaled unknowns, steps are
//! damped by a halving line search, and candidate steps that scramble the
//! event order are rejected outright.

use crate::error::{Error, Result};
use crate::model::{OrbitState, SequenceRow, TransferProblem};
use crate::propagator::{
    optimal_switching, propagate_burn, propagate_coast, propagate_schedule, Costate,
    ThrustSchedule, Trajectory, DEFAULT_STEP,
};
use crate::sensitivity::CostateGuess;
use crate::solvers::solve_linear_system;
use crate::units::{rad_per_s_to_deg_per_day, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions {
    /// Convergence threshold on the scaled residual norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative forward-difference step for the Jacobian.
    pub fd_step: f64,
    /// Integrator step bound, seconds.
    pub step: f64,
    pub max_backtracks: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 60,
            fd_step: 1e-7,
            step: DEFAULT_STEP,
            max_backtracks: 20,
        }
    }
}

/// The five shooting unknowns. Times are absolute, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingUnknowns {
    pub p_v0: f64,
    pub p_i0: f64,
    pub p_raan0: f64,
    pub t1: f64,
    pub t2: f64,
}

impl ShootingUnknowns {
    pub fn from_guess(guess: &CostateGuess, t1: f64, t2: f64) -> Self {
        Self {
            p_v0: guess.p_v0,
            p_i0: guess.p_i0,
            p_raan0: guess.p_raan0,
            t1,
            t2,
        }
    }

    pub fn costate(&self) -> Costate {
        Costate::new(self.p_v0, self.p_i0, self.p_raan0)
    }

    fn to_array(self) -> [f64; 5] {
        [self.p_v0, self.p_i0, self.p_raan0, self.t1, self.t2]
    }

    fn from_array(z: [f64; 5]) -> Self {
        Self {
            p_v0: z[0],
            p_i0: z[1],
            p_raan0: z[2],
            t1: z[3],
            t2: z[4],
        }
    }
}

/// Converged transfer with its supporting data.
#[derive(Debug, Clone)]
pub struct TransferSolution {
    pub unknowns: ShootingUnknowns,
    /// Unscaled residual: m/s, rad, rad, and the two switching values.
    pub residual: [f64; 5],
    pub scaled_norm: f64,
    /// Total cost, m/s.
    pub delta_v: f64,
    pub iterations: usize,
    /// True when a switch time converged onto a window edge, so an arc has
    /// collapsed and the switching condition there is inactive.
    pub boundary: bool,
    pub schedule: ThrustSchedule,
    pub trajectory: Trajectory,
    pub sequence: Vec<SequenceRow>,
}

/// Residual of the optimality system at a trial point.
///
/// Order: terminal speed error (m/s), terminal inclination error (rad),
/// terminal node error (rad), switching at `t1`, switching at `t2`.
pub fn shooting_residual(
    problem: &TransferProblem,
    z: &ShootingUnknowns,
    options: &ShootingOptions,
) -> Result<[f64; 5]> {
    let schedule = ThrustSchedule::new(problem.start.epoch, z.t1, z.t2, problem.target.epoch)?;
    let gravity = &problem.gravity;
    let (s1, c1) = propagate_burn(
        problem.start,
        z.costate(),
        problem.accel,
        gravity,
        schedule.t1,
        options.step,
        None,
    )?;
    let switch1 = optimal_switching(s1.velocity, &c1);
    let (s2, c2) = propagate_coast(s1, c1, gravity, schedule.t2);
    let switch2 = optimal_switching(s2.velocity, &c2);
    let (sf, _) = propagate_burn(s2, c2, problem.accel, gravity, schedule.tf, options.step, None)?;
    Ok([
        sf.velocity - problem.target.velocity,
        sf.inclination - problem.target.inclination,
        sf.raan - problem.effective_target_raan(schedule.tf),
        switch1,
        switch2,
    ])
}

fn scaled_norm(residual: &[f64; 5], v_ref: f64) -> f64 {
    let r = [
        residual[0] / v_ref,
        residual[1],
        residual[2],
        residual[3],
        residual[4],
    ];
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn order_ok(problem: &TransferProblem, z: &[f64; 5]) -> bool {
    problem.start.epoch <= z[3] && z[3] <= z[4] && z[4] <= problem.target.epoch
}

pub fn solve_shooting(
    problem: &TransferProblem,
    seed: &ShootingUnknowns,
    options: &ShootingOptions,
) -> Result<TransferSolution> {
    let v_ref = problem.start.velocity;
    let window = problem.window();
    let mut z = seed.to_array();
    if !order_ok(problem, &z) {
        return Err(Error::ScheduleOrder(
            [problem.start.epoch, z[3], z[4], problem.target.epoch].map(|t| t / SECONDS_PER_DAY),
        ));
    }
    let mut residual = shooting_residual(problem, &ShootingUnknowns::from_array(z), options)?;
    let mut norm = scaled_norm(&residual, v_ref);

    for iteration in 0..=options.max_iter {
        if norm < options.tol {
            return finish(problem, ShootingUnknowns::from_array(z), residual, norm, iteration, options);
        }
        if iteration == options.max_iter {
            break;
        }

        // Unknown scales keep the Jacobian well conditioned: adjoints by
        // their magnitude, dates by the window length.
        let scale = [
            z[0].abs().max(0.1),
            z[1].abs().max(100.0),
            z[2].abs().max(10.0),
            window,
            window,
        ];
        let mut jac = [[0.0; 5]; 5];
        for j in 0..5 {
            let h = options.fd_step * scale[j];
            let mut zj = z;
            zj[j] += h;
            if !order_ok(problem, &zj) {
                zj[j] = z[j] - h;
            }
            let rj = shooting_residual(problem, &ShootingUnknowns::from_array(zj), options)?;
            let dz = (zj[j] - z[j]) / scale[j];
            for i in 0..5 {
                let (ri, r0) = if i == 0 {
                    (rj[i] / v_ref, residual[i] / v_ref)
                } else {
                    (rj[i], residual[i])
                };
                jac[i][j] = (ri - r0) / dz;
            }
        }
        let rhs = [
            -residual[0] / v_ref,
            -residual[1],
            -residual[2],
            -residual[3],
            -residual[4],
        ];
        let step = solve_linear_system(jac, rhs)?;

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=options.max_backtracks {
            let trial: [f64; 5] = std::array::from_fn(|j| z[j] + alpha * step[j] * scale[j]);
            if order_ok(problem, &trial) {
                if let Ok(r_trial) =
                    shooting_residual(problem, &ShootingUnknowns::from_array(trial), options)
                {
                    let n_trial = scaled_norm(&r_trial, v_ref);
                    if n_trial < norm {
                        z = trial;
                        residual = r_trial;
                        norm = n_trial;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::MaxIterations {
                context: "shooting line search",
                iterations: iteration,
                residual: norm,
            });
        }
    }
    Err(Error::MaxIterations {
        context: "shooting",
        iterations: options.max_iter,
        residual: norm,
    })
}

fn finish(
    problem: &TransferProblem,
    unknowns: ShootingUnknowns,
    residual: [f64; 5],
    norm: f64,
    iterations: usize,
    options: &ShootingOptions,
) -> Result<TransferSolution> {
    let schedule = ThrustSchedule::new(
        problem.start.epoch,
        unknowns.t1,
        unknowns.t2,
        problem.target.epoch,
    )?;
    let trajectory = propagate_schedule(
        problem.start,
        unknowns.costate(),
        problem.accel,
        &problem.gravity,
        &schedule,
        options.step,
    )?;
    let boundary =
        schedule.t1 - schedule.t0 < 1.0 || schedule.tf - schedule.t2 < 1.0;
    let sequence = sequence_rows(problem, &schedule, &trajectory);
    Ok(TransferSolution {
        unknowns,
        residual,
        scaled_norm: norm,
        delta_v: problem.accel * schedule.burn_time(),
        iterations,
        boundary,
        schedule,
        trajectory,
        sequence,
    })
}

fn sequence_rows(
    problem: &TransferProblem,
    schedule: &ThrustSchedule,
    trajectory: &Trajectory,
) -> Vec<SequenceRow> {
    let gravity = &problem.gravity;
    let burn1 = problem.accel * (schedule.t1 - schedule.t0);
    let burn2 = problem.accel * (schedule.tf - schedule.t2);
    let state_at = |arc: usize, first: bool| -> OrbitState {
        let points = &trajectory.arcs[arc].points;
        if first {
            points.first().unwrap().state
        } else {
            points.last().unwrap().state
        }
    };
    vec![
        SequenceRow::from_state("depart initial orbit", &state_at(0, true), gravity, 0.0),
        SequenceRow::from_state("start coast", &state_at(0, false), gravity, burn1),
        SequenceRow::from_state("end coast", &state_at(1, false), gravity, 0.0),
        SequenceRow::from_state("arrive target orbit", &state_at(2, false), gravity, burn2),
    ]
}

/// Post-hoc optimality certificate for a converged solution.
#[derive(Debug, Clone)]
pub struct ExtremalCertificate {
    /// Worst per-arc relative drift of the invariant `h`.
    pub hamiltonian_drift: f64,
    /// Relative wander of the node adjoint, which has an exactly zero rate.
    pub p_raan_drift: f64,
    /// Switching values at the two switch times.
    pub s_at_switches: [f64; 2],
    /// Thrust pays on burns, not on the coast.
    pub switching_pattern_ok: bool,
    /// Node rate actually flown on the coast, deg/day.
    pub coast_rate_deg_day: f64,
    /// Coast rate implied by the invariant taken at departure, `h / p_raan`.
    pub predicted_coast_rate_deg_day: f64,
    pub violations: Vec<String>,
}

impl ExtremalCertificate {
    pub fn is_extremal(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_extremal(
    problem: &TransferProblem,
    solution: &TransferSolution,
) -> ExtremalCertificate {
    let mut violations = Vec::new();
    let trajectory = &solution.trajectory;

    let hamiltonian_drift = trajectory
        .arcs
        .iter()
        .map(|a| a.hamiltonian_drift())
        .fold(0.0, f64::max);
    if hamiltonian_drift > 1e-6 {
        violations.push(format!("invariant h drifts by {hamiltonian_drift:.3e}"));
    }

    let p0 = solution.unknowns.p_raan0;
    let p_raan_drift = trajectory
        .samples()
        .map(|p| (p.costate.p_raan - p0).abs())
        .fold(0.0, f64::max)
        / p0.abs().max(1e-12);
    if p_raan_drift > 1e-12 {
        violations.push(format!("node adjoint drifts by {p_raan_drift:.3e}"));
    }

    let s_at_switches = [solution.residual[3], solution.residual[4]];
    for (label, s) in ["t1", "t2"].iter().zip(s_at_switches) {
        if s.abs() > 1e-6 {
            violations.push(format!("switching at {label} is {s:.3e}, not zero"));
        }
    }

    let pattern_margin = 1e-7;
    let mut switching_pattern_ok = true;
    for (idx, arc) in trajectory.arcs.iter().enumerate() {
        for p in &arc.points {
            let bad = if arc.accel > 0.0 {
                p.switching < -pattern_margin
            } else {
                p.switching > pattern_margin
            };
            if bad {
                switching_pattern_ok = false;
                violations.push(format!(
                    "switching sign contradicts the throttle on arc {idx} at t = {:.3} day",
                    p.state.epoch / SECONDS_PER_DAY
                ));
                break;
            }
        }
    }

    // Isoprecession: the invariant fixes the coast's node rate from data
    // gathered at departure, before the coast is ever reached.
    let depart = trajectory.first();
    let coast = trajectory.arcs[1]
        .points
        .first()
        .expect("coast arc is sampled");
    let coast_rate = coast.state.raan_rate(&problem.gravity);
    let predicted = depart.hamiltonian / solution.unknowns.p_raan0;
    let rate_err = ((coast_rate - predicted) / coast_rate).abs();
    if rate_err > 1e-6 {
        violations.push(format!(
            "coast node rate off the invariant prediction by {rate_err:.3e}"
        ));
    }

    ExtremalCertificate {
        hamiltonian_drift,
        p_raan_drift,
        s_at_switches,
        switching_pattern_ok,
        coast_rate_deg_day: rad_per_s_to_deg_per_day(coast_rate),
        predicted_coast_rate_deg_day: rad_per_s_to_deg_per_day(predicted),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GravityModel;
    use crate::sensitivity::{estimate_costates, SensitivityOptions};
    use crate::ses::solve_ses;
    use crate::units::{days_to_seconds, deg_to_rad};
    use approx::assert_relative_eq;

    fn mission(window_days: f64) -> TransferProblem {
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
        .coasted_to(&earth, days_to_seconds(window_days));
        TransferProblem::new(start, target, 3.5e-3, earth).unwrap()
    }

    fn solve(problem: &TransferProblem) -> TransferSolution {
        let ses = solve_ses(problem).unwrap();
        let guess = estimate_costates(problem, &SensitivityOptions::default()).unwrap();
        let seed = ShootingUnknowns::from_guess(&guess, ses.schedule.t1, ses.schedule.t2);
        solve_shooting(problem, &seed, &ShootingOptions::default()).unwrap()
    }

    #[test]
    fn converges_on_the_reference_mission() {
        let problem = mission(100.0);
        let sol = solve(&problem);
        assert!(sol.scaled_norm < 1e-8, "norm {}", sol.scaled_norm);
        assert!(sol.iterations < 30, "took {} iterations", sol.iterations);
        assert!(!sol.boundary);
        assert!((595.0..601.0).contains(&sol.delta_v), "delta-v {}", sol.delta_v);
        assert!((1.0..1.2).contains(&(sol.unknowns.t1 / SECONDS_PER_DAY)));
        assert!((99.0..99.3).contains(&(sol.unknowns.t2 / SECONDS_PER_DAY)));
        // Terminal state meets the drifting target plane.
        let end = sol.trajectory.last().state;
        assert_relative_eq!(end.velocity, problem.target.velocity, max_relative = 1e-9);
        assert_relative_eq!(end.inclination, problem.target.inclination, max_relative = 1e-9);
        assert_relative_eq!(
            end.raan,
            problem.effective_target_raan(problem.target.epoch),
            max_relative = 1e-9
        );
        // The exact solution cannot cost more than the heuristic it refines.
        let ses = solve_ses(&problem).unwrap();
        assert!(sol.delta_v <= ses.delta_v + 1e-6);
    }

    #[test]
    fn worse_seed_reaches_the_same_solution() {
        let problem = mission(100.0);
        let reference = solve(&problem);
        // A deliberately rougher seed: adjoints off by several percent,
        // switch dates off by half an hour.
        let seed = ShootingUnknowns {
            p_v0: -0.630,
            p_i0: -8852.2,
            p_raan0: -760.31,
            t1: days_to_seconds(1.075),
            t2: days_to_seconds(99.137),
        };
        let sol = solve_shooting(&problem, &seed, &ShootingOptions::default()).unwrap();
        assert!(sol.scaled_norm < 1e-8);
        assert_relative_eq!(sol.unknowns.p_v0, reference.unknowns.p_v0, max_relative = 1e-6);
        assert_relative_eq!(sol.unknowns.p_i0, reference.unknowns.p_i0, max_relative = 1e-6);
        assert_relative_eq!(
            sol.unknowns.p_raan0,
            reference.unknowns.p_raan0,
            max_relative = 1e-6
        );
        assert_relative_eq!(sol.unknowns.t1, reference.unknowns.t1, max_relative = 1e-6);
        assert_relative_eq!(sol.unknowns.t2, reference.unknowns.t2, max_relative = 1e-6);
    }

    #[test]
    fn certificate_is_clean_for_a_converged_solution() {
        let problem = mission(100.0);
        let sol = solve(&problem);
        let cert = verify_extremal(&problem, &sol);
        assert!(cert.is_extremal(), "violations: {:?}", cert.violations);
        assert!(cert.hamiltonian_drift < 1e-7);
        assert!(cert.switching_pattern_ok);
        assert!(cert.s_at_switches[0].abs() < 1e-8);
        // The coast precesses faster than either endpoint orbit, eastward.
        assert!(cert.coast_rate_deg_day > 1.0);
        assert_relative_eq!(
            cert.coast_rate_deg_day,
            cert.predicted_coast_rate_deg_day,
            max_relative = 1e-7
        );
    }

    #[test]
    fn a_tighter_window_still_converges() {
        let problem = mission(50.0);
        let sol = solve(&problem);
        assert!(sol.scaled_norm < 1e-8);
        // Less time to drift means a lower, more inclined coast orbit and a
        // costlier transfer.
        let relaxed = solve(&mission(100.0));
        assert!(sol.delta_v > relaxed.delta_v);
        let cert = verify_extremal(&problem, &sol);
        assert!(cert.is_extremal(), "violations: {:?}", cert.violations);
    }

    #[test]
    fn misordered_seed_is_rejected() {
        let problem = mission(100.0);
        let seed = ShootingUnknowns {
            p_v0: -0.6,
            p_i0: -9000.0,
            p_raan0: -800.0,
            t1: days_to_seconds(99.0),
            t2: days_to_seconds(1.0),
        };
        assert!(matches!(
            solve_shooting(&problem, &seed, &ShootingOptions::default()),
            Err(Error::ScheduleOrder(_))
        ));
    }

    #[test]
    fn sequence_has_four_events_in_order() {
        let problem = mission(100.0);
        let sol = solve(&problem);
        assert_eq!(sol.sequence.len(), 4);
        for w in sol.sequence.windows(2) {
            assert!(w[0].time_day <= w[1].time_day);
        }
        let total: f64 = sol.sequence.iter().map(|r| r.impulse).sum();
        assert_relative_eq!(total, sol.delta_v, max_relative = 1e-12);
    }
}
