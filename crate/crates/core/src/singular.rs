//! Intermediate-thrust (singular) arcs: steering law, the sustainable
//! acceleration profile over inclination, its critical angles, and transfer
//! costs along the iso-precession manifold.
//!
//! A singular arc keeps the switching function at zero over an interval, so
//! the throttle is interior rather than bang-bang. Holding the first time
//! derivative of the switching function at zero ties the yaw to inclination:
//!
//! ```text
//! tan(yaw) * tan(inc) = alpha,    alpha = -7 pi / 2
//! ```
//!
//! and holding the second derivative at zero solves for the thrust
//! acceleration as a function of inclination, scaled by the conserved
//! product `x = p_raan * node_rate` and the cost multiplier `p0`. Because the
//! invariant `h = p_raan * node_rate` is constant on the arc, a singular arc
//! rides an iso-precession manifold `v(inc) = (-rate / (k cos inc))^(1/7)`,
//! and the transfer cost between two inclinations on that manifold is a pure
//! quadrature independent of the thrust profile used to fly it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use crate::edelbaum::EdelbaumTransfer;
use crate::error::{Error, Result};
use crate::model::{GravityModel, TransferProblem};
use crate::propagator::ThrustSchedule;
use crate::solvers::{bracket_sign_change, brent_root, simpson};

/// `tan(yaw) * tan(inc)` on every sustained intermediate-thrust arc.
pub const SINGULAR_TAN_PRODUCT: f64 = -7.0 * PI / 2.0;

/// Yaw of the singular steering law, zero at 90 deg and antisymmetric about
/// it (principal branch).
pub fn singular_yaw(inclination: f64) -> f64 {
    (SINGULAR_TAN_PRODUCT / inclination.tan()).atan()
}

/// The four inclinations that structure the singular acceleration profile:
/// the poles bounding the positive band, and the interior extrema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalInclinations {
    /// Lower edge of the band where sustained thrust is positive, rad.
    pub band_low: f64,
    pub band_high: f64,
    /// Local extrema of the profile inside the band, rad.
    pub trough_low: f64,
    pub trough_high: f64,
}

pub fn critical_inclinations() -> CriticalInclinations {
    let a2 = SINGULAR_TAN_PRODUCT * SINGULAR_TAN_PRODUCT;
    let band_low = ((a2 - 7.0) / 6.0).sqrt().atan();
    let trough_low = ((4.0 * a2 - 7.0) / 3.0).sqrt().atan();
    CriticalInclinations {
        band_low,
        band_high: PI - band_low,
        trough_low,
        trough_high: PI - trough_low,
    }
}

/// One-parameter family of singular arcs, fixed by the conserved product
/// `x = p_raan * node_rate` (the motion invariant `h` of the arc) and the
/// cost multiplier `p0 < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularFamily {
    pub costate_rate_product: f64,
    pub p0: f64,
}

/// Trigonometric core of the sustainable-acceleration profile; diverges at
/// the band edges and at 90 deg.
fn profile(inclination: f64) -> f64 {
    let (sin_inc, cos_inc) = inclination.sin_cos();
    let yaw = singular_yaw(inclination);
    let (sin_yaw, cos_yaw) = yaw.sin_cos();
    let g_yaw = -7.0 * cos_inc * sin_yaw + (2.0 / PI) * sin_inc * cos_yaw;
    let q = (4.0 / (PI * PI) - 7.0) * cos_inc * sin_yaw - (12.0 / PI) * sin_inc * cos_yaw;
    g_yaw * g_yaw / (cos_inc * sin_yaw * q)
}

impl SingularFamily {
    /// `p0` that makes the in-band extrema of [`Self::accel`] graze
    /// `costate_rate_product * f_max` in magnitude.
    pub fn p0_grazing_troughs(f_max: f64) -> f64 {
        let a2 = SINGULAR_TAN_PRODUCT * SINGULAR_TAN_PRODUCT;
        -(7.0 / 9.0) * (a2 - 1.0) / (a2 * f_max)
    }

    /// `p0` that makes the profile's limits at 0 and 180 deg graze
    /// `costate_rate_product * f_max`.
    pub fn p0_grazing_limits(f_max: f64) -> f64 {
        let a2 = SINGULAR_TAN_PRODUCT * SINGULAR_TAN_PRODUCT;
        -a2 / ((a2 - 7.0) * f_max)
    }

    /// Thrust acceleration that keeps the arc singular, from the full
    /// second-derivative condition on the switching function. Defined on
    /// (0, 180) deg away from the three poles.
    pub fn accel_costate_form(&self, inclination: f64) -> f64 {
        -(self.costate_rate_product / self.p0) * profile(inclination)
    }

    /// Production form of the profile, `-1/7` of [`Self::accel_costate_form`];
    /// its sign pattern over inclination is the one tabulated by
    /// [`critical_inclinations`]: positive strictly inside the band for
    /// `costate_rate_product < 0`, negative outside, even about 90 deg.
    pub fn accel(&self, inclination: f64) -> f64 {
        -self.accel_costate_form(inclination) / 7.0
    }
}

/// Speed of the iso-precession manifold at an inclination, i.e. the circular
/// orbit whose node drifts at `drift_rate` with that inclination.
pub fn manifold_velocity(
    gravity: &GravityModel,
    drift_rate: f64,
    inclination: f64,
) -> Result<f64> {
    let radicand = -drift_rate / (gravity.drift_constant() * inclination.cos());
    if !(radicand > 0.0) {
        return Err(Error::PrecessionSign {
            rate: drift_rate,
            inc_deg: inclination.to_degrees(),
        });
    }
    Ok(radicand.powf(1.0 / 7.0))
}

/// Delta-v to ride the iso-precession manifold between two inclinations.
///
/// The integrand is `(v(inc)/7) sqrt(tan(inc)^2 + alpha^2)`; the result does
/// not depend on the thrust level used to fly the arc. The manifold blows up
/// at 90 deg, so paths across it are rejected.
pub fn singular_cost(
    gravity: &GravityModel,
    drift_rate: f64,
    inc_from: f64,
    inc_to: f64,
    intervals: usize,
) -> Result<f64> {
    let (lo, hi) = if inc_from <= inc_to {
        (inc_from, inc_to)
    } else {
        (inc_to, inc_from)
    };
    if lo <= FRAC_PI_2 && FRAC_PI_2 <= hi {
        return Err(Error::PoleCrossing(90.0));
    }
    simpson(
        |inc| {
            let v = manifold_velocity(gravity, drift_rate, inc)?;
            let t = inc.tan();
            Ok(v / 7.0 * (t * t + SINGULAR_TAN_PRODUCT * SINGULAR_TAN_PRODUCT).sqrt())
        },
        lo,
        hi,
        intervals,
    )
}

/// Burn-coast-burn realization of a transfer whose node adjoint is zero: the
/// whole closed-form burn is singular (thrust level free), so a coast can be
/// split into it wherever the node bookkeeping demands.
#[derive(Debug, Clone)]
pub struct CoastSplitTransfer {
    pub burn: EdelbaumTransfer,
    /// Burn time flown before the coast, seconds.
    pub split_elapsed: f64,
    pub coast_duration: f64,
    pub schedule: ThrustSchedule,
    pub final_raan: f64,
    pub delta_v: f64,
}

fn burn_segment_raan_drift(
    burn: &EdelbaumTransfer,
    gravity: &GravityModel,
    from: f64,
    to: f64,
    intervals: usize,
) -> Result<f64> {
    let k = gravity.drift_constant();
    simpson(
        |t| {
            let p = burn.state_at(t);
            Ok(-k * p.velocity.powi(7) * p.inclination.cos())
        },
        from,
        to,
        intervals,
    )
}

/// Builds the zero-node-adjoint transfer for a problem: one closed-form burn
/// split by a coast placed where the node constraint closes. The cost is the
/// closed-form delta-v regardless of the thrust level.
pub fn zero_node_adjoint_transfer(
    problem: &TransferProblem,
    intervals: usize,
) -> Result<CoastSplitTransfer> {
    let gravity = &problem.gravity;
    let burn = EdelbaumTransfer::new(
        problem.start.velocity,
        problem.start.inclination,
        problem.target.velocity,
        problem.target.inclination,
        problem.accel,
    )?;
    let window = problem.window();
    let coast_duration = window - burn.duration;
    if coast_duration < 0.0 {
        return Err(Error::Infeasible(format!(
            "window holds {:.3e} s but the burn needs {:.3e} s",
            window, burn.duration
        )));
    }
    let target_raan = problem.effective_target_raan(problem.target.epoch);
    let miss = |split: f64| -> Result<f64> {
        let p = burn.state_at(split);
        let coast_drift = gravity.raan_rate(p.velocity, p.inclination) * coast_duration;
        Ok(problem.start.raan
            + burn_segment_raan_drift(&burn, gravity, 0.0, split, intervals)?
            + coast_drift
            + burn_segment_raan_drift(&burn, gravity, split, burn.duration, intervals)?
            - target_raan)
    };
    let (lo, hi) = bracket_sign_change(miss, 0.0, burn.duration, 32, "coast split")?;
    let split_elapsed = brent_root(miss, lo, hi, 1e-6, 100, "coast split")?;
    let t0 = problem.start.epoch;
    let schedule = ThrustSchedule::new(
        t0,
        t0 + split_elapsed,
        t0 + split_elapsed + coast_duration,
        t0 + split_elapsed + coast_duration + (burn.duration - split_elapsed),
    )?;
    let final_raan = target_raan + miss(split_elapsed)?;
    Ok(CoastSplitTransfer {
        burn,
        split_elapsed,
        coast_duration,
        schedule,
        final_raan,
        delta_v: burn.delta_v,
    })
}

/// CSV of the singular acceleration profile over inclination (degrees).
pub fn write_accel_profile_csv(
    out: &mut impl Write,
    family: &SingularFamily,
    points: usize,
) -> io::Result<()> {
    writeln!(out, "inclination_deg,accel_ms2,accel_costate_form_ms2")?;
    let n = points.max(2);
    for i in 0..n {
        let inc_deg = 0.5 + (179.0 - 0.5) * (i as f64) / ((n - 1) as f64);
        let inc = inc_deg.to_radians();
        writeln!(
            out,
            "{:.4},{:.6e},{:.6e}",
            inc_deg,
            family.accel(inc),
            family.accel_costate_form(inc)
        )?;
    }
    Ok(())
}
