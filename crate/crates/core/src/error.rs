use thiserror::Error;

/// Log-polar value `exp(log_mag + i·arg)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogPolar {
    pub log_mag: f64,
    pub arg: f64,
}

impl LogPolar {
    pub fn new(log_mag: f64, arg: f64) -> Self {
        Self { log_mag, arg: wrap_angle(arg) }
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI { r - TAU } else { r }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value overflows f64; log-polar result {0:?}")]
    Overflow(LogPolar),

    #[error("orbit cannot be continued at step {step}: value exceeds the log-continuation range")]
    OrbitOverflow { step: usize },

    #[error("tower logarithm undefined: represented value {0} has non-positive logarithm")]
    TowerDomain(f64),

    #[error("M(R,f) <= R for R = {0}; choose a larger R")]
    NonEscalating(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration did not converge for period {period}")]
    NoConvergence { period: usize },

    #[error("Newton derivative vanished near {re}+{im}i")]
    DerivativeSingular { re: f64, im: f64 },

    #[error("cycle found at {re}+{im}i has exact period {true_period}, not {requested}")]
    WrongPeriod { re: f64, im: f64, true_period: usize, requested: usize },

    #[error("all grid orbits overflow before step {0}; use a smaller n")]
    GridOverflow(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("precision exhausted: {bits} bits resolve at most {max_n} steps")]
    PrecisionExhausted { bits: u32, max_n: usize },

    #[error("schedule infeasible at step {0}: target leaves the tract")]
    ScheduleInfeasible(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
