//! Orbit and vehicle model shared by every solver in the crate.
//!
//! The dynamics are orbit-averaged: a circular orbit is reduced to its
//! velocity `v = sqrt(mu / r)`, inclination, and ascending-node angle. Thrust
//! changes `v` and inclination; Earth's oblateness precesses the node at
//! `-k v^7 cos(inc)` with `k` a constant of the gravity field. The node is
//! stored unwrapped so multi-revolution phasing stays monotone.

use crate::error::{Error, Result};
use crate::units::{rad_per_s_to_deg_per_day, SECONDS_PER_DAY};

/// Central-body gravity field: point mass plus the leading oblateness term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityModel {
    mu: f64,
    re: f64,
    j2: f64,
    /// Precomputed nodal-drift constant, s^6/m^7.
    k: f64,
}

impl GravityModel {
    pub fn new(mu: f64, re: f64, j2: f64) -> Result<Self> {
        if !(mu > 0.0) || !(re > 0.0) {
            return Err(Error::InvalidInput(format!(
                "gravity parameters must be positive (mu = {mu}, re = {re})"
            )));
        }
        let k = 3.0 * j2 * re * re / (2.0 * mu.powi(3));
        Ok(Self { mu, re, j2, k })
    }

    /// Earth field (meter/second units).
    pub fn earth() -> Self {
        Self::new(3.986005e14, 6_378_137.0, 1.08266e-3)
            .expect("earth constants are positive")
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn equatorial_radius(&self) -> f64 {
        self.re
    }

    pub fn j2(&self) -> f64 {
        self.j2
    }

    /// Nodal-drift constant `k` in `raan_rate = -k v^7 cos(inc)`, s^6/m^7.
    pub fn drift_constant(&self) -> f64 {
        self.k
    }

    /// Ascending-node drift rate in rad/s for a circular orbit.
    ///
    /// Retrograde orbits (`inc > 90 deg`) drift eastward, prograde westward.
    pub fn raan_rate(&self, velocity: f64, inclination: f64) -> f64 {
        -self.k * velocity.powi(7) * inclination.cos()
    }

    /// Circular-orbit speed at a given altitude above the equatorial radius.
    pub fn velocity_from_altitude(&self, altitude: f64) -> Result<f64> {
        let radius = self.re + altitude;
        if !(radius > 0.0) {
            return Err(Error::NonPositiveRadius(radius));
        }
        Ok((self.mu / radius).sqrt())
    }

    /// Altitude of the circular orbit with the given speed.
    pub fn altitude_from_velocity(&self, velocity: f64) -> Result<f64> {
        if !(velocity > 0.0) {
            return Err(Error::InvalidInput(format!(
                "circular-orbit speed must be positive, got {velocity} m/s"
            )));
        }
        Ok(self.mu / (velocity * velocity) - self.re)
    }
}

/// Averaged state of a circular orbit at one instant.
///
/// All fields are SI: m/s, radians, seconds. `raan` is unwrapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub velocity: f64,
    pub inclination: f64,
    pub raan: f64,
    pub epoch: f64,
}

impl OrbitState {
    pub fn new(velocity: f64, inclination: f64, raan: f64, epoch: f64) -> Self {
        Self {
            velocity,
            inclination,
            raan,
            epoch,
        }
    }

    pub fn from_altitude(
        gravity: &GravityModel,
        altitude: f64,
        inclination: f64,
        raan: f64,
        epoch: f64,
    ) -> Result<Self> {
        Ok(Self {
            velocity: gravity.velocity_from_altitude(altitude)?,
            inclination,
            raan,
            epoch,
        })
    }

    pub fn radius(&self, gravity: &GravityModel) -> f64 {
        gravity.mu() / (self.velocity * self.velocity)
    }

    pub fn altitude(&self, gravity: &GravityModel) -> f64 {
        self.radius(gravity) - gravity.equatorial_radius()
    }

    /// Node drift rate at this state, rad/s.
    pub fn raan_rate(&self, gravity: &GravityModel) -> f64 {
        gravity.raan_rate(self.velocity, self.inclination)
    }

    /// The same orbit left to drift until `epoch` (seconds).
    pub fn coasted_to(&self, gravity: &GravityModel, epoch: f64) -> Self {
        Self {
            raan: self.raan + self.raan_rate(gravity) * (epoch - self.epoch),
            epoch,
            ..*self
        }
    }
}

/// Propellant spent by an ideal rocket delivering `delta_v` from mass `m0`.
pub fn propellant_mass(initial_mass: f64, delta_v: f64, exhaust_velocity: f64) -> Result<f64> {
    if !(initial_mass > 0.0) || !(exhaust_velocity > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mass and exhaust velocity must be positive (m0 = {initial_mass}, ve = {exhaust_velocity})"
        )));
    }
    if delta_v < 0.0 {
        return Err(Error::InvalidInput(format!(
            "delta-v must be non-negative, got {delta_v}"
        )));
    }
    Ok(initial_mass * (1.0 - (-delta_v / exhaust_velocity).exp()))
}

/// Vehicle mass budget for converting delta-v into propellant numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropellantBudget {
    pub initial_mass: f64,
    pub exhaust_velocity: f64,
}

impl PropellantBudget {
    pub fn propellant_for(&self, delta_v: f64) -> Result<f64> {
        propellant_mass(self.initial_mass, delta_v, self.exhaust_velocity)
    }

    pub fn final_mass(&self, delta_v: f64) -> Result<f64> {
        Ok(self.initial_mass - self.propellant_for(delta_v)?)
    }
}

/// A rendezvous-class transfer: leave `start`, meet the plane of `target`
/// (which keeps drifting while we fly) no later than `target.epoch`.
///
/// `raan_branch` selects how many extra full node revolutions the chaser
/// winds relative to the target; branch 0 is the direct match.
#[derive(Debug, Clone, Copy)]
pub struct TransferProblem {
    pub start: OrbitState,
    pub target: OrbitState,
    /// Maximum thrust acceleration, m/s^2.
    pub accel: f64,
    pub gravity: GravityModel,
    pub raan_branch: i32,
}

impl TransferProblem {
    pub fn new(
        start: OrbitState,
        target: OrbitState,
        accel: f64,
        gravity: GravityModel,
    ) -> Result<Self> {
        if !(accel > 0.0) {
            return Err(Error::NonPositiveAccel(accel));
        }
        if target.epoch <= start.epoch {
            return Err(Error::InvalidInput(format!(
                "target epoch {} s must follow start epoch {} s",
                target.epoch, start.epoch
            )));
        }
        Ok(Self {
            start,
            target,
            accel,
            gravity,
            raan_branch: 0,
        })
    }

    pub fn with_branch(mut self, branch: i32) -> Self {
        self.raan_branch = branch;
        self
    }

    /// Node angle the chaser must reach at `epoch` (seconds), branch included.
    pub fn effective_target_raan(&self, epoch: f64) -> f64 {
        self.target.coasted_to(&self.gravity, epoch).raan
            + std::f64::consts::TAU * f64::from(self.raan_branch)
    }

    /// Transfer window length in seconds.
    pub fn window(&self) -> f64 {
        self.target.epoch - self.start.epoch
    }
}

/// One line of a mission sequence table: the orbit right after an event.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRow {
    pub label: String,
    /// Event time in days from the window start.
    pub time_day: f64,
    pub altitude_km: f64,
    pub velocity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub precession_deg_day: f64,
    /// Delta-v spent by the event, m/s (zero for coast boundaries).
    pub impulse: f64,
}

impl SequenceRow {
    pub fn from_state(
        label: impl Into<String>,
        state: &OrbitState,
        gravity: &GravityModel,
        impulse: f64,
    ) -> Self {
        Self {
            label: label.into(),
            time_day: state.epoch / SECONDS_PER_DAY,
            altitude_km: state.altitude(gravity) / 1e3,
            velocity: state.velocity,
            inclination_deg: state.inclination.to_degrees(),
            raan_deg: state.raan.to_degrees(),
            precession_deg_day: rad_per_s_to_deg_per_day(state.raan_rate(gravity)),
            impulse,
        }
    }
}
