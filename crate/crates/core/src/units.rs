//! Unit conversions.
//!
//! Internally everything is SI (meters, seconds, radians). Mission input and
//! output use days and degrees, which is where these helpers come in.

pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub fn days_to_seconds(days: f64) -> f64 {
    days * SECONDS_PER_DAY
}

pub fn seconds_to_days(seconds: f64) -> f64 {
    seconds / SECONDS_PER_DAY
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn km_to_m(km: f64) -> f64 {
    km * 1e3
}

pub fn m_to_km(m: f64) -> f64 {
    m / 1e3
}

/// rad/s to deg/day, the customary unit for nodal precession rates.
pub fn rad_per_s_to_deg_per_day(rate: f64) -> f64 {
    rate.to_degrees() * SECONDS_PER_DAY
}

pub fn deg_per_day_to_rad_per_s(rate: f64) -> f64 {
    rate.to_radians() / SECONDS_PER_DAY
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut out = theta.rem_euclid(two_pi);
    if out > std::f64::consts::PI {
        out -= two_pi;
    }
    out
}
