use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("orbit radius must be positive, got {0} m")]
    NonPositiveRadius(f64),

    #[error("thrust acceleration must be positive, got {0} m/s^2")]
    NonPositiveAccel(f64),

    #[error("degenerate steering: both costates vanish, control undefined")]
    DegenerateControl,

    #[error("schedule times must satisfy t0 <= t1 <= t2 <= tf, got {0:?} days")]
    ScheduleOrder([f64; 4]),

    #[error("failed to bracket a sign change for {context} in [{lo}, {hi}]")]
    BracketFailed {
        context: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("{context} did not converge after {iterations} iterations (residual {residual:.3e})")]
    MaxIterations {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("state became non-finite during {0}")]
    NonFiniteState(&'static str),

    #[error("Jacobian is numerically singular (pivot {0:.3e})")]
    SingularJacobian(f64),

    #[error("inclination path crosses a polar singularity near {0} deg")]
    PoleCrossing(f64),

    #[error(
        "requested drift rate {rate:.3e} rad/s has the wrong sign for inclination {inc_deg:.2} deg"
    )]
    PrecessionSign { rate: f64, inc_deg: f64 },

    #[error("requested epoch {t_day} days lies outside the window [{start_day}, {end_day}]")]
    OutsideWindow {
        t_day: f64,
        start_day: f64,
        end_day: f64,
    },
}
