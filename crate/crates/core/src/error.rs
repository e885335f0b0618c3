use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("speed {speed} m/s is outside [0, {v_max}] m/s")]
    SpeedOutOfRange { speed: f64, v_max: f64 },

    #[error("torque equation has no real positive root (psi*R = {flux_r} <= V*L = {volt_l})")]
    NoRealRoot { flux_r: f64, volt_l: f64 },

    #[error("speed {speed} m/s cannot finish a {distance} m move within {coherence_time} s")]
    InfeasibleSpeed {
        speed: f64,
        distance: f64,
        coherence_time: f64,
    },

    #[error("array length {array_length} m holds no grid point of step {step} m")]
    EmptyGrid { array_length: f64, step: f64 },

    #[error("position {position} m lies outside [0, {array_length}] m")]
    PositionOutOfRange { position: f64, array_length: f64 },

    #[error("position {position} m is not on the candidate grid")]
    OffGrid { position: f64 },

    #[error("time {time} s lies outside the movement window [0, {tau}] s")]
    TimeOutOfRange { time: f64, tau: f64 },

    #[error("exhaustive permutation search supports at most {max} antennas, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("channel vector is zero")]
    ZeroChannel,

    #[error("channel matrix is rank deficient")]
    RankDeficient,

    #[error("linearization point admits no strictly feasible start for user {user}")]
    InfeasibleLinearization { user: usize },

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
