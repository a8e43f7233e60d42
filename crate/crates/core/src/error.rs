use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: schema, ids, physical invariants, dimensions.
    Validation,
    /// The numbers went wrong: singular matrices, divergence, poles.
    Numerical,
    /// A legitimate "nothing to report" outcome.
    NoFault,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("{element}: {message}")]
    Invalid { element: String, message: String },

    #[error("network is disconnected: bus {unreachable} cannot be reached from bus {root}")]
    Disconnected { root: i64, unreachable: i64 },

    #[error(
        "bus admittance matrix is singular or ill-conditioned (condition estimate {condition:.3e})"
    )]
    Singular { condition: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("solver diverged at iteration {iteration}; try a smaller step size tau")]
    Diverged { iteration: usize },

    #[error("no fault detected")]
    NoFault,

    #[error("degenerate ratio {re:+.6e}{im:+.6e}i: distance formula has a pole or zero here")]
    DegenerateRatio { re: f64, im: f64 },

    #[error("unknown line id `{0}`")]
    UnknownLine(String),

    #[error("unknown bus id {0}")]
    UnknownBus(i64),

    #[error("grid oracle supports at most 6 unknowns, got {0}")]
    OracleDimension(usize),
}

impl Error {
    pub(crate) fn invalid(element: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            element: element.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Singular { .. }
            | Error::NonFinite(_)
            | Error::Diverged { .. }
            | Error::DegenerateRatio { .. } => ErrorKind::Numerical,
            Error::NoFault => ErrorKind::NoFault,
            _ => ErrorKind::Validation,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
