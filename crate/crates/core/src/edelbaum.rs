//! Closed-form continuous-thrust transfer between two circular orbits,
//! ignoring node motion: the classical constant-acceleration solution for
//! combined velocity and inclination change.
//!
//! With the yaw angle `beta` measured so that `dv/dt = -f cos(beta)` and
//! `di/dt = 2 f sin(beta) / (pi v)`, the optimal burn keeps `v sin(beta)`
//! constant. Mapping inclination to the swept angle `psi = (pi/2) (i1 - i0)`
//! turns the transfer into a straight line in a velocity plane, giving the
//! law-of-cosines cost
//!
//! ```text
//! dv^2 = v0^2 + v1^2 - 2 v0 v1 cos(psi)
//! ```
//!
//! and an explicit time parametrization of the whole arc. These burns are the
//! building blocks of the burn-coast-burn solvers in this crate; they also
//! serve as an independent check on the trajectory integrator.

use crate::error::{Error, Result};

/// Transfer cost in m/s between two circular orbits (inclinations in rad).
///
/// Uses the half-angle form, which stays accurate when the endpoints nearly
/// coincide.
pub fn cost(v_start: f64, inc_start: f64, v_end: f64, inc_end: f64) -> f64 {
    let psi = std::f64::consts::FRAC_PI_2 * (inc_end - inc_start);
    let s = (0.5 * psi).sin();
    ((v_start - v_end).powi(2) + 4.0 * v_start * v_end * s * s).sqrt()
}

/// Yaw angle at the start of the optimal burn, in (-pi, pi].
pub fn initial_yaw(v_start: f64, inc_start: f64, v_end: f64, inc_end: f64) -> f64 {
    let psi = std::f64::consts::FRAC_PI_2 * (inc_end - inc_start);
    let s = (0.5 * psi).sin();
    // v_start - v_end cos(psi), rearranged to avoid cancellation.
    f64::atan2(v_end * psi.sin(), (v_start - v_end) + 2.0 * v_end * s * s)
}

/// Orbit and steering along a burn at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdelbaumPoint {
    pub velocity: f64,
    pub inclination: f64,
    pub yaw: f64,
}

/// Gradient of the transfer cost with respect to its four endpoint values
/// (velocities in m/s, inclinations in rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaVGradient {
    pub wrt_v_start: f64,
    pub wrt_inc_start: f64,
    pub wrt_v_end: f64,
    pub wrt_inc_end: f64,
}

/// One constant-acceleration burn between two circular orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdelbaumTransfer {
    pub v_start: f64,
    pub inc_start: f64,
    pub v_end: f64,
    pub inc_end: f64,
    /// Thrust acceleration, m/s^2.
    pub accel: f64,
    /// Yaw at ignition; the yaw then sweeps monotonically.
    pub yaw_start: f64,
    pub delta_v: f64,
    /// Burn time in seconds, `delta_v / accel`.
    pub duration: f64,
}

impl EdelbaumTransfer {
    pub fn new(
        v_start: f64,
        inc_start: f64,
        v_end: f64,
        inc_end: f64,
        accel: f64,
    ) -> Result<Self> {
        if !(v_start > 0.0) || !(v_end > 0.0) {
            return Err(Error::InvalidInput(format!(
                "circular-orbit speeds must be positive, got {v_start} and {v_end}"
            )));
        }
        if !(accel > 0.0) {
            return Err(Error::NonPositiveAccel(accel));
        }
        let delta_v = cost(v_start, inc_start, v_end, inc_end);
        let yaw_start = if delta_v == 0.0 {
            0.0
        } else {
            initial_yaw(v_start, inc_start, v_end, inc_end)
        };
        Ok(Self {
            v_start,
            inc_start,
            v_end,
            inc_end,
            accel,
            yaw_start,
            delta_v,
            duration: delta_v / accel,
        })
    }

    /// True for a burn between coincident endpoints (nothing to do).
    pub fn is_degenerate(&self) -> bool {
        self.delta_v == 0.0
    }

    /// Total inclination sweep mapped to the velocity plane.
    fn swept_angle(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 * (self.inc_end - self.inc_start)
    }

    /// Yaw when the burn ends.
    pub fn yaw_end(&self) -> f64 {
        self.yaw_start + self.swept_angle()
    }

    /// Orbit and steering `elapsed` seconds after ignition.
    ///
    /// Valid for `0 <= elapsed <= duration`; outside that range the
    /// parametrization keeps extrapolating the same thrust law.
    pub fn state_at(&self, elapsed: f64) -> EdelbaumPoint {
        if self.is_degenerate() {
            return EdelbaumPoint {
                velocity: self.v_start,
                inclination: self.inc_start,
                yaw: 0.0,
            };
        }
        // Coordinates in the velocity plane: the cross-track component
        // v sin(yaw) is conserved, the along-track one shrinks at rate f.
        let along = self.v_start * self.yaw_start.cos() - self.accel * elapsed;
        let cross = self.v_start * self.yaw_start.sin();
        let yaw = f64::atan2(cross, along);
        EdelbaumPoint {
            velocity: along.hypot(cross),
            inclination: self.inc_start
                + std::f64::consts::FRAC_2_PI * (yaw - self.yaw_start),
            yaw,
        }
    }

    /// Cost gradient with respect to the burn's endpoints.
    ///
    /// Errors for a degenerate burn, where the gradient has no limit.
    pub fn endpoint_gradient(&self) -> Result<DeltaVGradient> {
        if self.is_degenerate() {
            return Err(Error::DegenerateControl);
        }
        let psi = self.swept_angle();
        let half = std::f64::consts::FRAC_PI_2;
        let cross = self.v_start * self.v_end * psi.sin();
        Ok(DeltaVGradient {
            wrt_v_start: (self.v_start - self.v_end * psi.cos()) / self.delta_v,
            wrt_inc_start: -half * cross / self.delta_v,
            wrt_v_end: (self.v_end - self.v_start * psi.cos()) / self.delta_v,
            wrt_inc_end: half * cross / self.delta_v,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::rk4_path;
    use crate::units::deg_to_rad;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn coplanar_raise_costs_velocity_difference() {
        // Raising a circular orbit slows it; coplanar cost is just |dv|.
        let t = EdelbaumTransfer::new(7451.8, deg_to_rad(98.0), 7400.5, deg_to_rad(98.0), 3.5e-3)
            .unwrap();
        assert_relative_eq!(t.delta_v, 51.3, max_relative = 1e-3);
        assert_abs_diff_eq!(t.yaw_start, 0.0);
        // Descending in altitude means speeding up: thrust flips around.
        let down =
            EdelbaumTransfer::new(7400.5, deg_to_rad(98.0), 7451.8, deg_to_rad(98.0), 3.5e-3)
                .unwrap();
        assert_abs_diff_eq!(down.yaw_start, std::f64::consts::PI);
        assert_relative_eq!(down.delta_v, t.delta_v);
    }

    #[test]
    fn pure_plane_change_cost() {
        // Equal speeds: dv = 2 v sin(psi/2).
        let v = 7500.0;
        let di = deg_to_rad(2.0);
        let t = EdelbaumTransfer::new(v, deg_to_rad(98.0), v, deg_to_rad(98.0) + di, 3.5e-3)
            .unwrap();
        let psi = std::f64::consts::FRAC_PI_2 * di;
        assert_relative_eq!(t.delta_v, 2.0 * v * (0.5 * psi).sin(), max_relative = 1e-12);
        // Yaw starts just under 90 deg and sweeps symmetrically past it.
        assert_abs_diff_eq!(t.yaw_start, std::f64::consts::FRAC_PI_2 - 0.5 * psi, epsilon = 1e-12);
        assert_abs_diff_eq!(t.yaw_end(), std::f64::consts::FRAC_PI_2 + 0.5 * psi, epsilon = 1e-12);
    }

    #[test]
    fn endpoints_are_reproduced() {
        let t = EdelbaumTransfer::new(7451.8, deg_to_rad(98.0), 7664.0, deg_to_rad(99.2), 3.5e-3)
            .unwrap();
        let start = t.state_at(0.0);
        assert_relative_eq!(start.velocity, t.v_start, max_relative = 1e-14);
        assert_relative_eq!(start.inclination, t.inc_start, max_relative = 1e-14);
        let end = t.state_at(t.duration);
        assert_relative_eq!(end.velocity, t.v_end, max_relative = 1e-12);
        assert_relative_eq!(end.inclination, t.inc_end, max_relative = 1e-9);
        assert_relative_eq!(end.yaw, t.yaw_end(), max_relative = 1e-9);
    }

    #[test]
    fn cross_track_component_is_conserved() {
        let t = EdelbaumTransfer::new(7300.0, deg_to_rad(97.0), 7700.0, deg_to_rad(100.0), 2e-3)
            .unwrap();
        let reference = t.v_start * t.yaw_start.sin();
        for step in 0..=20 {
            let p = t.state_at(t.duration * step as f64 / 20.0);
            assert_relative_eq!(p.velocity * p.yaw.sin(), reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (v0, i0, v1, i1) = (7451.8, deg_to_rad(98.0), 7664.0, deg_to_rad(99.2));
        let g = EdelbaumTransfer::new(v0, i0, v1, i1, 3.5e-3)
            .unwrap()
            .endpoint_gradient()
            .unwrap();
        let dv = 1e-3;
        let di = 1e-8;
        let fd_v0 = (cost(v0 + dv, i0, v1, i1) - cost(v0 - dv, i0, v1, i1)) / (2.0 * dv);
        let fd_i0 = (cost(v0, i0 + di, v1, i1) - cost(v0, i0 - di, v1, i1)) / (2.0 * di);
        let fd_v1 = (cost(v0, i0, v1 + dv, i1) - cost(v0, i0, v1 - dv, i1)) / (2.0 * dv);
        let fd_i1 = (cost(v0, i0, v1, i1 + di) - cost(v0, i0, v1, i1 - di)) / (2.0 * di);
        assert_relative_eq!(g.wrt_v_start, fd_v0, max_relative = 1e-6);
        assert_relative_eq!(g.wrt_inc_start, fd_i0, max_relative = 1e-6);
        assert_relative_eq!(g.wrt_v_end, fd_v1, max_relative = 1e-6);
        assert_relative_eq!(g.wrt_inc_end, fd_i1, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_burn_is_a_fixed_point() {
        let t = EdelbaumTransfer::new(7500.0, 1.7, 7500.0, 1.7, 3.5e-3).unwrap();
        assert!(t.is_degenerate());
        assert_eq!(t.duration, 0.0);
        let p = t.state_at(0.0);
        assert_eq!(p.velocity, 7500.0);
        assert!(t.endpoint_gradient().is_err());
    }

    /// Integrates the averaged thrust dynamics with the closed-form yaw
    /// profile as open-loop control; the endpoint must land on the target.
    fn ode_endpoint_error(v0: f64, i0: f64, v1: f64, i1: f64, accel: f64) -> (f64, f64) {
        let t = EdelbaumTransfer::new(v0, i0, v1, i1, accel).unwrap();
        let y = rk4_path(
            [v0, i0],
            0.0,
            t.duration,
            t.duration / 4000.0,
            |tau, y| {
                let yaw = t.state_at(tau).yaw;
                [
                    -accel * yaw.cos(),
                    2.0 * accel * yaw.sin() / (std::f64::consts::PI * y[0]),
                ]
            },
            |_, _| {},
        )
        .unwrap();
        (
            (y[0] - v1).abs() / v1,
            (y[1] - i1).abs() / i1.abs().max(1e-3),
        )
    }

    #[test]
    fn closed_form_matches_integrated_dynamics() {
        let cases = [
            (7451.8, 98.0, 7664.0, 99.2),
            (7664.0, 99.2, 7400.5, 99.0),
            (7000.0, 85.0, 7800.0, 95.0),
            (7600.0, 100.0, 7100.0, 82.0),
        ];
        for (v0, i0, v1, i1) in cases {
            let (ev, ei) = ode_endpoint_error(v0, deg_to_rad(i0), v1, deg_to_rad(i1), 3.5e-3);
            assert!(ev < 1e-8 && ei < 1e-8, "case {v0}->{v1}: errors {ev}, {ei}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_transfers_match_integrated_dynamics(
            v0 in 6900.0..7800.0f64,
            v1 in 6900.0..7800.0f64,
            i0_deg in 80.0..110.0f64,
            i1_deg in 80.0..110.0f64,
        ) {
            prop_assume!((v0 - v1).abs() > 1.0 || (i0_deg - i1_deg).abs() > 0.01);
            let (ev, ei) =
                ode_endpoint_error(v0, deg_to_rad(i0_deg), v1, deg_to_rad(i1_deg), 3.5e-3);
            prop_assert!(ev < 1e-6, "velocity endpoint error {ev}");
            prop_assert!(ei < 1e-6, "inclination endpoint error {ei}");
        }

        #[test]
        fn cost_is_symmetric_and_dominates_speed_change(
            v0 in 6900.0..7800.0f64,
            v1 in 6900.0..7800.0f64,
            i0_deg in 80.0..110.0f64,
            i1_deg in 80.0..110.0f64,
        ) {
            let (i0, i1) = (deg_to_rad(i0_deg), deg_to_rad(i1_deg));
            let forward = cost(v0, i0, v1, i1);
            let back = cost(v1, i1, v0, i0);
            prop_assert!((forward - back).abs() <= 1e-9 * forward.max(1.0));
            prop_assert!(forward >= (v0 - v1).abs() - 1e-9);
        }
    }
}
