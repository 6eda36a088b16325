//! TOML mission description and its translation into solver inputs.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use lowthrust_core::model::{GravityModel, OrbitState, PropellantBudget, TransferProblem};
use lowthrust_core::sensitivity::{Perturbations, SensitivityOptions};
use lowthrust_core::ses::SesOptions;
use lowthrust_core::shooting::ShootingOptions;
use lowthrust_core::singular::SingularFamily;
use lowthrust_core::units::{days_to_seconds, deg_to_rad, km_to_m};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionConfig {
    pub initial: OrbitSection,
    pub target: TargetSection,
    pub vehicle: VehicleSection,
    #[serde(default)]
    pub gravity: GravitySection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
    #[serde(default)]
    pub singular: SingularSection,
}

/// Departure orbit. Size it with exactly one of `altitude_km` or
/// `velocity_ms`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub altitude_km: Option<f64>,
    pub velocity_ms: Option<f64>,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    #[serde(default)]
    pub epoch_day: f64,
}

/// Arrival plane. Its node angle is stated at `raan_epoch_day` (the
/// departure epoch when omitted) and keeps precessing until `arrival_day`,
/// the end of the transfer window.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub altitude_km: Option<f64>,
    pub velocity_ms: Option<f64>,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub raan_epoch_day: Option<f64>,
    pub arrival_day: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    /// Thrust acceleration, m/s^2.
    pub accel_ms2: f64,
    pub mass_kg: Option<f64>,
    pub exhaust_velocity_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GravitySection {
    pub mu: Option<f64>,
    pub equatorial_radius: Option<f64>,
    pub j2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub step_day: f64,
    pub tolerance: f64,
    pub quadrature_intervals: usize,
    pub drift_altitude_bounds_km: [f64; 2],
    pub branch: i32,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            step_day: 0.005,
            tolerance: 1e-8,
            quadrature_intervals: 64,
            drift_altitude_bounds_km: [150.0, 2000.0],
            branch: 0,
        }
    }
}

/// Finite-difference steps for the boundary sensitivity estimates.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivitySection {
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub date_day: f64,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        Self {
            altitude_km: 50.0,
            inclination_deg: 0.1,
            raan_deg: 5.0,
            date_day: 5.0,
        }
    }
}

/// Parameters of the intermediate-thrust family examined by the
/// singular-analysis mode.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingularSection {
    pub costate_rate_product: f64,
    /// Cost multiplier; defaults to the value whose in-band extrema graze
    /// the vehicle acceleration.
    pub p0: Option<f64>,
}

impl Default for SingularSection {
    fn default() -> Self {
        Self {
            costate_rate_product: -0.5,
            p0: None,
        }
    }
}

fn section_speed(
    gravity: &GravityModel,
    altitude_km: Option<f64>,
    velocity_ms: Option<f64>,
    section: &str,
) -> Result<f64> {
    match (altitude_km, velocity_ms) {
        (Some(_), Some(_)) => bail!("[{section}] sets both altitude_km and velocity_ms"),
        (None, None) => bail!("[{section}] needs altitude_km or velocity_ms"),
        (Some(alt), None) => Ok(gravity.velocity_from_altitude(km_to_m(alt))?),
        (None, Some(v)) => {
            if !(v > 0.0) {
                bail!("[{section}] velocity_ms must be positive");
            }
            Ok(v)
        }
    }
}

impl MissionConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).context("parsing mission config")?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.target.arrival_day <= self.initial.epoch_day {
            bail!(
                "[target] arrival_day = {} must come after [initial] epoch_day = {}",
                self.target.arrival_day,
                self.initial.epoch_day
            );
        }
        if !(self.vehicle.accel_ms2 > 0.0) {
            bail!("[vehicle] accel_ms2 must be positive");
        }
        if self.vehicle.mass_kg.is_some() != self.vehicle.exhaust_velocity_ms.is_some() {
            bail!("[vehicle] mass_kg and exhaust_velocity_ms go together");
        }
        let [lo, hi] = self.solver.drift_altitude_bounds_km;
        if !(lo < hi) {
            bail!("[solver] drift_altitude_bounds_km must be an increasing pair");
        }
        // Surface speed questions early rather than deep inside a solve.
        let gravity = self.gravity()?;
        section_speed(
            &gravity,
            self.initial.altitude_km,
            self.initial.velocity_ms,
            "initial",
        )?;
        section_speed(
            &gravity,
            self.target.altitude_km,
            self.target.velocity_ms,
            "target",
        )?;
        Ok(())
    }

    pub fn gravity(&self) -> Result<GravityModel> {
        let earth = GravityModel::earth();
        Ok(GravityModel::new(
            self.gravity.mu.unwrap_or(earth.mu()),
            self.gravity
                .equatorial_radius
                .unwrap_or(earth.equatorial_radius()),
            self.gravity.j2.unwrap_or(earth.j2()),
        )?)
    }

    pub fn problem(&self) -> Result<TransferProblem> {
        let gravity = self.gravity()?;
        let start = OrbitState::new(
            section_speed(
                &gravity,
                self.initial.altitude_km,
                self.initial.velocity_ms,
                "initial",
            )?,
            deg_to_rad(self.initial.inclination_deg),
            deg_to_rad(self.initial.raan_deg),
            days_to_seconds(self.initial.epoch_day),
        );
        let stated = OrbitState::new(
            section_speed(
                &gravity,
                self.target.altitude_km,
                self.target.velocity_ms,
                "target",
            )?,
            deg_to_rad(self.target.inclination_deg),
            deg_to_rad(self.target.raan_deg),
            days_to_seconds(self.target.raan_epoch_day.unwrap_or(self.initial.epoch_day)),
        );
        let target = stated.coasted_to(&gravity, days_to_seconds(self.target.arrival_day));
        Ok(TransferProblem::new(start, target, self.vehicle.accel_ms2, gravity)?
            .with_branch(self.solver.branch))
    }

    pub fn ses_options(&self) -> SesOptions {
        let [lo, hi] = self.solver.drift_altitude_bounds_km;
        SesOptions {
            quadrature_intervals: self.solver.quadrature_intervals,
            drift_altitude_bounds: (km_to_m(lo), km_to_m(hi)),
            ..SesOptions::default()
        }
    }

    pub fn sensitivity_options(&self) -> SensitivityOptions {
        SensitivityOptions {
            perturbations: Perturbations {
                altitude: km_to_m(self.sensitivity.altitude_km),
                inclination: deg_to_rad(self.sensitivity.inclination_deg),
                raan: deg_to_rad(self.sensitivity.raan_deg),
                date: days_to_seconds(self.sensitivity.date_day),
            },
            ses: self.ses_options(),
        }
    }

    pub fn shooting_options(&self) -> ShootingOptions {
        ShootingOptions {
            tol: self.solver.tolerance,
            step: days_to_seconds(self.solver.step_day),
            ..ShootingOptions::default()
        }
    }

    pub fn budget(&self) -> Option<PropellantBudget> {
        match (self.vehicle.mass_kg, self.vehicle.exhaust_velocity_ms) {
            (Some(initial_mass), Some(exhaust_velocity)) => Some(PropellantBudget {
                initial_mass,
                exhaust_velocity,
            }),
            _ => None,
        }
    }

    pub fn singular_family(&self) -> SingularFamily {
        SingularFamily {
            costate_rate_product: self.singular.costate_rate_product,
            p0: self
                .singular
                .p0
                .unwrap_or_else(|| SingularFamily::p0_grazing_troughs(self.vehicle.accel_ms2)),
        }
    }
}
