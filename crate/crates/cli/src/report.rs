//! Plain-text report sections and CSV writers shared by the pipeline modes.

use std::fmt::Write as _;
use std::io;

use anyhow::Result;
use lowthrust_core::model::{PropellantBudget, SequenceRow, TransferProblem};
use lowthrust_core::shooting::ExtremalCertificate;
use lowthrust_core::units::{rad_to_deg, seconds_to_days};

pub fn mission_header(problem: &TransferProblem) -> String {
    let start = &problem.start;
    let target = &problem.target;
    let gravity = &problem.gravity;
    let mut s = String::new();
    let _ = writeln!(s, "mission");
    let _ = writeln!(
        s,
        "  depart   {:8.1} km  {:7.3} deg  node {:8.3} deg  (day {:.3})",
        start.altitude(gravity) / 1e3,
        rad_to_deg(start.inclination),
        rad_to_deg(start.raan),
        seconds_to_days(start.epoch),
    );
    let _ = writeln!(
        s,
        "  arrive   {:8.1} km  {:7.3} deg  node {:8.3} deg  (day {:.3})",
        target.altitude(gravity) / 1e3,
        rad_to_deg(target.inclination),
        rad_to_deg(problem.effective_target_raan(target.epoch)),
        seconds_to_days(target.epoch),
    );
    let _ = writeln!(
        s,
        "  window   {:.3} days   thrust accel {:.3e} m/s^2   branch {}",
        seconds_to_days(problem.window()),
        problem.accel,
        problem.raan_branch,
    );
    s
}

pub fn sequence_section(rows: &[SequenceRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sequence");
    let _ = writeln!(
        s,
        "  {:<22} {:>9} {:>9} {:>9} {:>8} {:>9} {:>9} {:>8}",
        "event", "day", "alt km", "vel m/s", "inc deg", "node deg", "deg/day", "dv m/s"
    );
    for row in rows {
        let _ = writeln!(
            s,
            "  {:<22} {:>9.3} {:>9.1} {:>9.1} {:>8.3} {:>9.3} {:>9.5} {:>8.2}",
            row.label,
            row.time_day,
            row.altitude_km,
            row.velocity,
            row.inclination_deg,
            row.raan_deg,
            row.precession_deg_day,
            row.impulse,
        );
    }
    s
}

pub fn write_sequence_csv(out: &mut impl io::Write, rows: &[SequenceRow]) -> io::Result<()> {
    writeln!(
        out,
        "event,time_day,altitude_km,velocity_ms,inclination_deg,raan_deg,precession_deg_day,impulse_ms"
    )?;
    for row in rows {
        writeln!(
            out,
            "{},{:.6},{:.3},{:.3},{:.6},{:.6},{:.6},{:.4}",
            row.label,
            row.time_day,
            row.altitude_km,
            row.velocity,
            row.inclination_deg,
            row.raan_deg,
            row.precession_deg_day,
            row.impulse,
        )?;
    }
    Ok(())
}

pub fn propellant_section(budget: &PropellantBudget, delta_v: f64) -> Result<String> {
    let used = budget.propellant_for(delta_v)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "propellant  {:.1} kg of {:.1} kg ({:.2} %), final mass {:.1} kg",
        used,
        budget.initial_mass,
        100.0 * used / budget.initial_mass,
        budget.final_mass(delta_v)?,
    );
    Ok(s)
}

pub fn certificate_section(certificate: &ExtremalCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "extremal check");
    let _ = writeln!(
        s,
        "  invariant drift     {:.2e} relative (worst arc)",
        certificate.hamiltonian_drift
    );
    let _ = writeln!(
        s,
        "  node adjoint drift  {:.2e} relative",
        certificate.p_raan_drift
    );
    let _ = writeln!(
        s,
        "  switch values       {:.2e}, {:.2e}",
        certificate.s_at_switches[0], certificate.s_at_switches[1]
    );
    let _ = writeln!(
        s,
        "  coast node rate     {:.5} deg/day (invariant predicts {:.5})",
        certificate.coast_rate_deg_day, certificate.predicted_coast_rate_deg_day
    );
    if certificate.is_extremal() {
        let _ = writeln!(s, "  verdict             extremal");
    } else {
        for violation in &certificate.violations {
            let _ = writeln!(s, "  violation           {violation}");
        }
    }
    s
}
