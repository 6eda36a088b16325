//! Trajectory propagation for burn-coast-burn schedules driven by adjoint
//! variables.
//!
//! The state is `(v, inc, raan)` and the adjoint `(p_v, p_i, p_raan)` is the
//! gradient of the remaining propellant cost (as delta-v) with respect to the
//! state. Steering follows the minimum-cost direction
//!
//! ```text
//! yaw = atan2(-(2 / (pi v)) p_i, p_v)
//! ```
//!
//! and the throttle obeys the switching function `s = p0 + |grad|`: full
//! thrust where `s > 0`, coast where `s < 0`, with the cost multiplier
//! normalized to `p0 = -1`. Along a thrust arc the adjoints satisfy
//!
//! ```text
//! p_v'    =  7 p_raan k v^6 cos(inc) + (2 / (pi v^2)) p_i f sin(yaw)
//! p_i'    = -p_raan k v^7 sin(inc)
//! p_raan' =  0
//! ```
//!
//! and the scalar `h = p_raan * raan_rate - f * s` is constant on every arc,
//! which the test suites use as an integration invariant. Coasts freeze
//! `(v, inc)`, so they advance by exact closed-form increments rather than
//! numerically.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::model::{GravityModel, OrbitState};
use crate::solvers::rk4_path;
use crate::units::{rad_per_s_to_deg_per_day, SECONDS_PER_DAY};

/// Default integrator step: 0.005 day.
pub const DEFAULT_STEP: f64 = 0.005 * SECONDS_PER_DAY;

/// Adjoint of the averaged state, in cost-gradient convention: each entry is
/// the change of remaining delta-v per unit change of the matching state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Costate {
    /// m/s of cost per m/s of orbit speed (dimensionless).
    pub p_v: f64,
    /// m/s per radian of inclination.
    pub p_i: f64,
    /// m/s per radian of node angle.
    pub p_raan: f64,
    /// Cost multiplier; -1 in the normalization used throughout.
    pub p0: f64,
}

impl Costate {
    pub fn new(p_v: f64, p_i: f64, p_raan: f64) -> Self {
        Self {
            p_v,
            p_i,
            p_raan,
            p0: -1.0,
        }
    }

    pub fn with_p0(mut self, p0: f64) -> Self {
        self.p0 = p0;
        self
    }
}

/// Steering that decreases the remaining cost fastest; `atan2(0, 0) = 0`
/// would silently point the thrust forward, so a vanished adjoint is an error.
pub fn optimal_yaw(velocity: f64, costate: &Costate) -> Result<f64> {
    if costate.p_v == 0.0 && costate.p_i == 0.0 {
        return Err(Error::DegenerateControl);
    }
    Ok(yaw_unchecked(velocity, costate))
}

fn yaw_unchecked(velocity: f64, costate: &Costate) -> f64 {
    f64::atan2(-2.0 * costate.p_i / (PI * velocity), costate.p_v)
}

/// Switching value for an arbitrary steering angle.
pub fn switching_function(velocity: f64, costate: &Costate, yaw: f64) -> f64 {
    costate.p0 + costate.p_v * yaw.cos() - 2.0 * costate.p_i * yaw.sin() / (PI * velocity)
}

/// Switching value under optimal steering, `p0 + |grad|`; this is the maximum
/// of [`switching_function`] over yaw. Thrust pays off where it is positive.
pub fn optimal_switching(velocity: f64, costate: &Costate) -> f64 {
    costate.p0 + f64::hypot(costate.p_v, 2.0 * costate.p_i / (PI * velocity))
}

/// State, adjoint, and the derived control quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalPoint {
    pub state: OrbitState,
    pub costate: Costate,
    /// Thrust acceleration in effect, m/s^2 (zero on a coast).
    pub accel: f64,
    pub yaw: f64,
    /// Switching value under optimal steering.
    pub switching: f64,
    /// `p_raan * raan_rate - accel * switching`, m/s per second. Constant
    /// along each arc of an extremal.
    pub hamiltonian: f64,
}

impl ExtremalPoint {
    pub fn evaluate(
        state: OrbitState,
        costate: Costate,
        accel: f64,
        gravity: &GravityModel,
    ) -> Self {
        let yaw = yaw_unchecked(state.velocity, &costate);
        let switching = optimal_switching(state.velocity, &costate);
        let hamiltonian = costate.p_raan * state.raan_rate(gravity) - accel * switching;
        Self {
            state,
            costate,
            accel,
            yaw,
            switching,
            hamiltonian,
        }
    }
}

/// Burn-coast-burn event times, seconds. Degenerate arcs (equal times) are
/// allowed; ordering is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustSchedule {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub tf: f64,
}

impl ThrustSchedule {
    pub fn new(t0: f64, t1: f64, t2: f64, tf: f64) -> Result<Self> {
        let s = Self { t0, t1, t2, tf };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t0 <= self.t1 && self.t1 <= self.t2 && self.t2 <= self.tf {
            Ok(())
        } else {
            Err(Error::ScheduleOrder(
                [self.t0, self.t1, self.t2, self.tf].map(|t| t / SECONDS_PER_DAY),
            ))
        }
    }

    /// Total thrust-on time, seconds.
    pub fn burn_time(&self) -> f64 {
        (self.t1 - self.t0) + (self.tf - self.t2)
    }
}

/// One arc of a propagated trajectory with its sample points in time order.
#[derive(Debug, Clone)]
pub struct Arc {
    /// Thrust acceleration on this arc, m/s^2.
    pub accel: f64,
    pub points: Vec<ExtremalPoint>,
}

impl Arc {
    /// Largest relative drift of the arc invariant `h` across the samples,
    /// measured against the arc's starting value.
    pub fn hamiltonian_drift(&self) -> f64 {
        let Some(first) = self.points.first() else {
            return 0.0;
        };
        let h0 = first.hamiltonian;
        let scale = h0.abs().max(1e-12);
        self.points
            .iter()
            .map(|p| (p.hamiltonian - h0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Sampled burn-coast-burn trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub arcs: Vec<Arc>,
}

impl Trajectory {
    pub fn first(&self) -> &ExtremalPoint {
        self.arcs
            .first()
            .and_then(|a| a.points.first())
            .expect("trajectory has at least one sample")
    }

    pub fn last(&self) -> &ExtremalPoint {
        self.arcs
            .last()
            .and_then(|a| a.points.last())
            .expect("trajectory has at least one sample")
    }

    pub fn samples(&self) -> impl Iterator<Item = &ExtremalPoint> {
        self.arcs.iter().flat_map(|a| a.points.iter())
    }
}

fn pack(state: &OrbitState, costate: &Costate) -> [f64; 6] {
    [
        state.velocity,
        state.inclination,
        state.raan,
        costate.p_v,
        costate.p_i,
        costate.p_raan,
    ]
}

fn unpack(y: &[f64; 6], epoch: f64, p0: f64) -> (OrbitState, Costate) {
    (
        OrbitState::new(y[0], y[1], y[2], epoch),
        Costate::new(y[3], y[4], y[5]).with_p0(p0),
    )
}

fn burn_deriv(y: &[f64; 6], accel: f64, gravity: &GravityModel) -> [f64; 6] {
    let v = y[0];
    let inc = y[1];
    let yaw = f64::atan2(-2.0 * y[4] / (PI * v), y[3]);
    let (sin_yaw, cos_yaw) = yaw.sin_cos();
    let k = gravity.drift_constant();
    let v6 = v.powi(6);
    let (sin_inc, cos_inc) = inc.sin_cos();
    [
        -accel * cos_yaw,
        2.0 * accel * sin_yaw / (PI * v),
        -k * v6 * v * cos_inc,
        7.0 * y[5] * k * v6 * cos_inc + 2.0 * y[4] * accel * sin_yaw / (PI * v * v),
        -y[5] * k * v6 * v * sin_inc,
        0.0,
    ]
}

/// Integrates a full-thrust arc from `state.epoch` to `t_end`, appending a
/// sample at every integrator node when `samples` is provided.
pub fn propagate_burn(
    state: OrbitState,
    costate: Costate,
    accel: f64,
    gravity: &GravityModel,
    t_end: f64,
    max_step: f64,
    mut samples: Option<&mut Vec<ExtremalPoint>>,
) -> Result<(OrbitState, Costate)> {
    if !(accel > 0.0) {
        return Err(Error::NonPositiveAccel(accel));
    }
    let t0 = state.epoch;
    let p0 = costate.p0;
    let y = rk4_path(
        pack(&state, &costate),
        t0,
        t_end,
        max_step,
        |_, y| burn_deriv(y, accel, gravity),
        |t, y| {
            if let Some(out) = samples.as_deref_mut() {
                let (s, c) = unpack(y, t, p0);
                out.push(ExtremalPoint::evaluate(s, c, accel, gravity));
            }
        },
    )?;
    Ok(unpack(&y, t_end, p0))
}

/// Coast increments are linear in time, so this is exact: the node drifts at
/// the frozen rate and the adjoints pick up the oblateness coupling.
pub fn propagate_coast(
    state: OrbitState,
    costate: Costate,
    gravity: &GravityModel,
    t_end: f64,
) -> (OrbitState, Costate) {
    let dt = t_end - state.epoch;
    let k = gravity.drift_constant();
    let v6 = state.velocity.powi(6);
    let (sin_inc, cos_inc) = state.inclination.sin_cos();
    let next_state = OrbitState {
        raan: state.raan - k * v6 * state.velocity * cos_inc * dt,
        epoch: t_end,
        ..state
    };
    let next_costate = Costate {
        p_v: costate.p_v + 7.0 * costate.p_raan * k * v6 * cos_inc * dt,
        p_i: costate.p_i - costate.p_raan * k * v6 * state.velocity * sin_inc * dt,
        ..costate
    };
    (next_state, next_costate)
}

fn sample_coast(
    state: OrbitState,
    costate: Costate,
    gravity: &GravityModel,
    t_end: f64,
    max_step: f64,
    out: &mut Vec<ExtremalPoint>,
) -> (OrbitState, Costate) {
    let span = t_end - state.epoch;
    let n = if span > 0.0 {
        (span / max_step).ceil().max(1.0) as usize
    } else {
        0
    };
    out.push(ExtremalPoint::evaluate(state, costate, 0.0, gravity));
    let mut last = (state, costate);
    for i in 1..=n {
        let t = state.epoch + span * (i as f64) / (n as f64);
        last = propagate_coast(state, costate, gravity, t);
        out.push(ExtremalPoint::evaluate(last.0, last.1, 0.0, gravity));
    }
    last
}

/// Propagates a burn-coast-burn schedule and keeps every sample, grouped per
/// arc. `state.epoch` must sit on the schedule start.
pub fn propagate_schedule(
    state: OrbitState,
    costate: Costate,
    accel: f64,
    gravity: &GravityModel,
    schedule: &ThrustSchedule,
    max_step: f64,
) -> Result<Trajectory> {
    schedule.validate()?;
    if (state.epoch - schedule.t0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "state epoch {} s does not match schedule start {} s",
            state.epoch, schedule.t0
        )));
    }
    let mut arcs = Vec::with_capacity(3);

    let mut points = Vec::new();
    let (s1, c1) = propagate_burn(
        state,
        costate,
        accel,
        gravity,
        schedule.t1,
        max_step,
        Some(&mut points),
    )?;
    arcs.push(Arc { accel, points });

    let mut points = Vec::new();
    let (s2, c2) = sample_coast(s1, c1, gravity, schedule.t2, max_step, &mut points);
    arcs.push(Arc { accel: 0.0, points });

    let mut points = Vec::new();
    propagate_burn(
        s2,
        c2,
        accel,
        gravity,
        schedule.tf,
        max_step,
        Some(&mut points),
    )?;
    arcs.push(Arc { accel, points });

    Ok(Trajectory { arcs })
}

/// Endpoint of a schedule without sample bookkeeping; this is the hot path of
/// the shooting solver's finite-difference Jacobian.
pub fn schedule_endpoint(
    state: OrbitState,
    costate: Costate,
    accel: f64,
    gravity: &GravityModel,
    schedule: &ThrustSchedule,
    max_step: f64,
) -> Result<(OrbitState, Costate)> {
    schedule.validate()?;
    let (s1, c1) = propagate_burn(state, costate, accel, gravity, schedule.t1, max_step, None)?;
    let (s2, c2) = propagate_coast(s1, c1, gravity, schedule.t2);
    propagate_burn(s2, c2, accel, gravity, schedule.tf, max_step, None)
}

/// Integrates only the orbit state under a caller-supplied yaw program.
///
/// This bypasses the adjoints entirely, which makes it the right tool for
/// cross-checking closed-form arcs and for replaying a control history on a
/// rearranged schedule.
pub fn integrate_state_only(
    state: OrbitState,
    accel: f64,
    gravity: &GravityModel,
    t_end: f64,
    max_step: f64,
    mut yaw: impl FnMut(f64, &OrbitState) -> f64,
) -> Result<OrbitState> {
    let k = gravity.drift_constant();
    let epoch0 = state.epoch;
    let y = rk4_path(
        [state.velocity, state.inclination, state.raan],
        epoch0,
        t_end,
        max_step,
        |t, y| {
            let s = OrbitState::new(y[0], y[1], y[2], t);
            let (sin_yaw, cos_yaw) = yaw(t, &s).sin_cos();
            [
                -accel * cos_yaw,
                2.0 * accel * sin_yaw / (PI * y[0]),
                -k * y[0].powi(7) * y[1].cos(),
            ]
        },
        |_, _| {},
    )?;
    Ok(OrbitState::new(y[0], y[1], y[2], t_end))
}

/// Writes a trajectory as CSV in mission units (days, km, degrees; the
/// invariant `h` in m/s per day).
pub fn write_trajectory_csv(
    out: &mut impl Write,
    trajectory: &Trajectory,
    gravity: &GravityModel,
) -> io::Result<()> {
    writeln!(
        out,
        "t_day,altitude_km,velocity_ms,inclination_deg,raan_deg,accel_ms2,yaw_deg,switching,\
         hamiltonian_ms_day,p_v,p_i,p_raan"
    )?;
    for p in trajectory.samples() {
        writeln!(
            out,
            "{:.6},{:.3},{:.3},{:.6},{:.6},{:.6e},{:.4},{:.6e},{:.6},{:.6},{:.3},{:.3}",
            p.state.epoch / SECONDS_PER_DAY,
            p.state.altitude(gravity) / 1e3,
            p.state.velocity,
            p.state.inclination.to_degrees(),
            p.state.raan.to_degrees(),
            p.accel,
            p.yaw.to_degrees(),
            p.switching,
            p.hamiltonian * SECONDS_PER_DAY,
            p.costate.p_v,
            p.costate.p_i,
            p.costate.p_raan,
        )?;
    }
    Ok(())
}

// Re-exported for reporting: the node rate in customary units.
pub fn precession_deg_per_day(state: &OrbitState, gravity: &GravityModel) -> f64 {
    rad_per_s_to_deg_per_day(state.raan_rate(gravity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edelbaum::EdelbaumTransfer;
    use crate::units::deg_to_rad;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn earth() -> GravityModel {
        GravityModel::earth()
    }

    #[test]
    fn steering_points_along_falling_cost() {
        // Positive p_v: higher speed costs more, so thrust brakes (yaw 0).
        assert_abs_diff_eq!(optimal_yaw(7500.0, &Costate::new(1.0, 0.0, 0.0)).unwrap(), 0.0);
        // Negative p_v: speed up (yaw pi).
        assert_abs_diff_eq!(
            optimal_yaw(7500.0, &Costate::new(-1.0, 0.0, 0.0)).unwrap().abs(),
            std::f64::consts::PI
        );
        // Positive p_i alone: lower the inclination (yaw -pi/2).
        assert_abs_diff_eq!(
            optimal_yaw(7500.0, &Costate::new(0.0, 100.0, 0.0)).unwrap(),
            -std::f64::consts::FRAC_PI_2
        );
        assert!(optimal_yaw(7500.0, &Costate::new(0.0, 0.0, 5.0)).is_err());
    }

    #[test]
    fn optimal_yaw_maximizes_switching() {
        let costate = Costate::new(-0.6, -9000.0, -800.0);
        let v = 7451.8;
        let best = optimal_switching(v, &costate);
        assert_relative_eq!(
            best,
            switching_function(v, &costate, optimal_yaw(v, &costate).unwrap()),
            max_relative = 1e-12
        );
        for i in 0..360 {
            let yaw = deg_to_rad(i as f64);
            assert!(switching_function(v, &costate, yaw) <= best + 1e-12);
        }
    }

    #[test]
    fn coast_closed_form_matches_integrator() {
        let gravity = earth();
        let state = OrbitState::new(7664.0, deg_to_rad(99.2), deg_to_rad(12.0), 0.0);
        let costate = Costate::new(-0.63, -8852.0, -760.0);
        let t_end = 40.0 * SECONDS_PER_DAY;
        let (exact_s, exact_c) = propagate_coast(state, costate, &gravity, t_end);
        // Same arc integrated numerically with zero thrust.
        let y = rk4_path(
            pack(&state, &costate),
            0.0,
            t_end,
            600.0,
            |_, y| burn_deriv(y, 0.0, &gravity),
            |_, _| {},
        )
        .unwrap();
        assert_relative_eq!(exact_s.raan, y[2], max_relative = 1e-12);
        // The adjoint increments nearly cancel the initial values, so compare
        // absolutely: the gap is integrator rounding, not truncation.
        assert_abs_diff_eq!(exact_c.p_v, y[3], epsilon = 1e-10);
        assert_relative_eq!(exact_c.p_i, y[4], max_relative = 1e-10);
        assert_eq!(exact_c.p_raan, costate.p_raan);
    }

    #[test]
    fn hamiltonian_is_conserved_on_random_burns() {
        let gravity = earth();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let state = OrbitState::new(
                rng.gen_range(6900.0..7800.0),
                deg_to_rad(rng.gen_range(80.0..110.0)),
                rng.gen_range(-1.0..1.0),
                0.0,
            );
            let costate = Costate::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-15_000.0..15_000.0),
                rng.gen_range(-2_000.0..2_000.0),
            );
            if costate.p_v == 0.0 && costate.p_i == 0.0 {
                continue;
            }
            let accel = 3.5e-3;
            let mut samples = Vec::new();
            propagate_burn(
                state,
                costate,
                accel,
                &gravity,
                2.0 * SECONDS_PER_DAY,
                DEFAULT_STEP,
                Some(&mut samples),
            )
            .unwrap();
            let arc = Arc {
                accel,
                points: samples,
            };
            assert!(
                arc.hamiltonian_drift() < 1e-7,
                "h drift {} for costate {costate:?}",
                arc.hamiltonian_drift()
            );
            // The node adjoint has a trivial rate; RK4 must keep it exact.
            for p in &arc.points {
                assert_eq!(p.costate.p_raan, costate.p_raan);
            }
        }
    }

    /// Seeding the adjoints with the closed-form cost gradient (node adjoint
    /// zero) must reproduce the closed-form burn even under full gravity:
    /// same endpoint, gradient consistency mid-arc, and an identically zero
    /// switching value (single-burn cost does not depend on the acceleration
    /// level, so thrust is everywhere marginal).
    #[test]
    fn gradient_seeded_burn_reproduces_closed_form() {
        let gravity = earth();
        let (v0, i0, v1, i1) = (7451.8, deg_to_rad(98.0), 7664.0, deg_to_rad(99.2));
        let accel = 3.5e-3;
        let burn = EdelbaumTransfer::new(v0, i0, v1, i1, accel).unwrap();
        let g = burn.endpoint_gradient().unwrap();
        let costate = Costate::new(g.wrt_v_start, g.wrt_inc_start, 0.0);

        let mut samples = Vec::new();
        let (end, _) = propagate_burn(
            OrbitState::new(v0, i0, 0.0, 0.0),
            costate,
            accel,
            &gravity,
            burn.duration,
            60.0,
            Some(&mut samples),
        )
        .unwrap();
        assert_relative_eq!(end.velocity, v1, max_relative = 1e-10);
        assert_relative_eq!(end.inclination, i1, max_relative = 1e-10);

        for p in &samples {
            assert_abs_diff_eq!(p.switching, 0.0, epsilon = 1e-9);
        }
        // Adjoints along the arc equal the cost gradient from the current
        // point to the fixed endpoint (skip the last samples where the
        // remaining cost collapses to zero).
        for p in samples.iter().take(samples.len() - 30).skip(1) {
            let rest = EdelbaumTransfer::new(p.state.velocity, p.state.inclination, v1, i1, accel)
                .unwrap()
                .endpoint_gradient()
                .unwrap();
            assert_relative_eq!(p.costate.p_v, rest.wrt_v_start, max_relative = 1e-6);
            assert_relative_eq!(p.costate.p_i, rest.wrt_inc_start, max_relative = 1e-6);
        }
    }

    #[test]
    fn cost_gradient_has_unit_length() {
        // The closed-form cost satisfies |grad| = 1 in the scaled metric,
        // which is what makes the p0 = -1 normalization consistent.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let v0: f64 = rng.gen_range(6900.0..7800.0);
            let v1: f64 = rng.gen_range(6900.0..7800.0);
            let i0 = deg_to_rad(rng.gen_range(80.0..110.0));
            let i1 = deg_to_rad(rng.gen_range(80.0..110.0));
            if (v0 - v1).abs() < 1.0 && (i0 - i1).abs() < 1e-4 {
                continue;
            }
            let g = EdelbaumTransfer::new(v0, i0, v1, i1, 1e-3)
                .unwrap()
                .endpoint_gradient()
                .unwrap();
            let costate = Costate::new(g.wrt_v_start, g.wrt_inc_start, 0.0);
            assert_abs_diff_eq!(optimal_switching(v0, &costate), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn schedule_propagation_stitches_arcs() {
        let gravity = earth();
        let state = OrbitState::new(7451.8, deg_to_rad(98.0), 0.0, 0.0);
        let costate = Costate::new(-0.63, -8852.2, -760.31);
        let schedule = ThrustSchedule::new(
            0.0,
            1.0 * SECONDS_PER_DAY,
            9.0 * SECONDS_PER_DAY,
            10.0 * SECONDS_PER_DAY,
        )
        .unwrap();
        let traj =
            propagate_schedule(state, costate, 3.5e-3, &gravity, &schedule, DEFAULT_STEP).unwrap();
        assert_eq!(traj.arcs.len(), 3);
        assert_eq!(traj.arcs[1].accel, 0.0);
        assert_relative_eq!(traj.last().state.epoch, schedule.tf);
        // The lean endpoint propagator agrees with the sampled one.
        let (end, cend) =
            schedule_endpoint(state, costate, 3.5e-3, &gravity, &schedule, DEFAULT_STEP).unwrap();
        assert_relative_eq!(end.velocity, traj.last().state.velocity, max_relative = 1e-12);
        assert_relative_eq!(end.raan, traj.last().state.raan, max_relative = 1e-12);
        assert_relative_eq!(cend.p_i, traj.last().costate.p_i, max_relative = 1e-12);
        // Arc boundaries are shared samples.
        let burn1_end = traj.arcs[0].points.last().unwrap();
        let coast_start = traj.arcs[1].points.first().unwrap();
        assert_eq!(burn1_end.state.epoch, coast_start.state.epoch);
        assert_eq!(burn1_end.state.velocity, coast_start.state.velocity);
    }

    #[test]
    fn schedule_rejects_misordered_times() {
        assert!(matches!(
            ThrustSchedule::new(0.0, 2.0, 1.0, 3.0),
            Err(Error::ScheduleOrder(_))
        ));
    }

    #[test]
    fn state_only_replay_matches_closed_form() {
        let gravity = earth();
        let (v0, i0, v1, i1) = (7451.8, deg_to_rad(98.0), 7664.0, deg_to_rad(99.2));
        let accel = 3.5e-3;
        let burn = EdelbaumTransfer::new(v0, i0, v1, i1, accel).unwrap();
        let start = OrbitState::new(v0, i0, 0.3, 0.0);
        let replay =
            integrate_state_only(start, accel, &gravity, burn.duration, DEFAULT_STEP, |t, _| {
                burn.state_at(t).yaw
            })
            .unwrap();
        assert_relative_eq!(replay.velocity, v1, max_relative = 1e-9);
        assert_relative_eq!(replay.inclination, i1, max_relative = 1e-9);
        // Node drift along the burn, checked against direct quadrature of the
        // drift rate over the closed-form path.
        let k = gravity.drift_constant();
        let drift = crate::solvers::simpson(
            |t| {
                let p = burn.state_at(t);
                Ok(-k * p.velocity.powi(7) * p.inclination.cos())
            },
            0.0,
            burn.duration,
            2000,
        )
        .unwrap();
        assert_relative_eq!(replay.raan, 0.3 + drift, max_relative = 1e-10);
    }

    #[test]
    fn csv_writer_emits_header_and_rows() {
        let gravity = earth();
        let state = OrbitState::new(7451.8, deg_to_rad(98.0), 0.0, 0.0);
        let costate = Costate::new(-0.63, -8852.2, -760.31);
        let schedule =
            ThrustSchedule::new(0.0, 0.5 * SECONDS_PER_DAY, SECONDS_PER_DAY, 1.5 * SECONDS_PER_DAY)
                .unwrap();
        let traj =
            propagate_schedule(state, costate, 3.5e-3, &gravity, &schedule, DEFAULT_STEP).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, &gravity).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("t_day,altitude_km"));
        assert!(lines.count() > 100);
    }
}
