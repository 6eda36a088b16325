//! Self-contained solution records: everything needed to rebuild the
//! problem, re-fly the converged schedule, and confirm it still lands on
//! the target.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use lowthrust_core::model::{GravityModel, OrbitState, TransferProblem};
use lowthrust_core::propagator::{schedule_endpoint, Costate, ThrustSchedule, DEFAULT_STEP};
use lowthrust_core::shooting::TransferSolution;
use lowthrust_core::units::{days_to_seconds, deg_to_rad, rad_to_deg, seconds_to_days};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub velocity_ms: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub epoch_day: f64,
}

impl OrbitRecord {
    fn from_state(state: &OrbitState) -> Self {
        Self {
            velocity_ms: state.velocity,
            inclination_deg: rad_to_deg(state.inclination),
            raan_deg: rad_to_deg(state.raan),
            epoch_day: seconds_to_days(state.epoch),
        }
    }

    fn state(&self) -> OrbitState {
        OrbitState::new(
            self.velocity_ms,
            deg_to_rad(self.inclination_deg),
            deg_to_rad(self.raan_deg),
            days_to_seconds(self.epoch_day),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissionRecord {
    pub start: OrbitRecord,
    pub target: OrbitRecord,
    pub accel_ms2: f64,
    pub branch: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergedRecord {
    pub p_v0: f64,
    pub p_i0: f64,
    pub p_raan0: f64,
    /// Window start, burn end, coast end, arrival; days.
    pub schedule_day: [f64; 4],
    pub delta_v_ms: f64,
    pub scaled_residual_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub mission: MissionRecord,
    pub converged: ConvergedRecord,
}

impl SolutionRecord {
    pub fn new(problem: &TransferProblem, solution: &TransferSolution) -> Self {
        let s = &solution.schedule;
        Self {
            mission: MissionRecord {
                start: OrbitRecord::from_state(&problem.start),
                target: OrbitRecord::from_state(&problem.target),
                accel_ms2: problem.accel,
                branch: problem.raan_branch,
            },
            converged: ConvergedRecord {
                p_v0: solution.unknowns.p_v0,
                p_i0: solution.unknowns.p_i0,
                p_raan0: solution.unknowns.p_raan0,
                schedule_day: [s.t0, s.t1, s.t2, s.tf].map(seconds_to_days),
                delta_v_ms: solution.delta_v,
                scaled_residual_norm: solution.scaled_norm,
                iterations: solution.iterations,
            },
        }
    }

    pub fn problem(&self, gravity: GravityModel) -> Result<TransferProblem> {
        Ok(TransferProblem::new(
            self.mission.start.state(),
            self.mission.target.state(),
            self.mission.accel_ms2,
            gravity,
        )?
        .with_branch(self.mission.branch))
    }

    /// Re-flies the recorded schedule with the recorded costates and returns
    /// the endpoint miss (relative speed, inclination and node errors,
    /// root-sum-squared). Fails when the record no longer reproduces its own
    /// solution.
    pub fn verify(&self, gravity: GravityModel) -> Result<f64> {
        let problem = self.problem(gravity)?;
        let [t0, t1, t2, tf] = self.converged.schedule_day.map(days_to_seconds);
        let schedule = ThrustSchedule::new(t0, t1, t2, tf)?;
        let costate = Costate::new(
            self.converged.p_v0,
            self.converged.p_i0,
            self.converged.p_raan0,
        );
        let (end, _) = schedule_endpoint(
            problem.start,
            costate,
            problem.accel,
            &problem.gravity,
            &schedule,
            DEFAULT_STEP,
        )?;
        let target = &problem.target;
        let miss = ((end.velocity - target.velocity) / target.velocity).hypot(
            (end.inclination - target.inclination)
                .hypot(end.raan - problem.effective_target_raan(tf)),
        );
        if miss > 1e-5 {
            bail!("record does not reproduce its solution (endpoint miss {miss:.3e})");
        }
        Ok(miss)
    }
}

pub fn write_toml(path: &Path, record: &SolutionRecord) -> Result<()> {
    let text = toml::to_string_pretty(record).context("serializing solution record")?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_toml(path: &Path) -> Result<SolutionRecord> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
