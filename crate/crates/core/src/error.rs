use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("eigensolver did not converge (dimension {dim}, after {iterations} sweeps)")]
    NoConvergence { dim: usize, iterations: usize },

    #[error("k_max = {k_max} exceeds the {bound} bound-state-like transmon levels")]
    TooManyLevels { k_max: usize, bound: usize },

    #[error("level index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("unsupported coupling offset {0} (expected 1 or 3)")]
    UnsupportedOffset(usize),

    #[error("invalid strip offset {0} (expected 1 or 2)")]
    InvalidStripOffset(i64),

    #[error("dressed label {label} unavailable in strip N = {n_total} (dimension {dim})")]
    LabelUnavailable {
        label: usize,
        n_total: usize,
        dim: usize,
    },

    #[error(
        "no transmon-regime solution for omega_10 = {omega_10} GHz, eta = {eta} GHz: {reason}"
    )]
    NoTransmonSolution {
        omega_10: f64,
        eta: f64,
        reason: String,
    },

    #[error("dispersive pole: {0}")]
    DispersivePole(String),

    #[error("oracle inapplicable: {0}")]
    OracleInapplicable(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("table error: {0}")]
    Table(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}
