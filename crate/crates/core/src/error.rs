use thiserror::Error;

/// Errors raised by model construction, integration, estimation and ingestion.
///
/// Numeric payloads are widened to `f64` so that one error type serves every
/// scalar instantiation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} outside [0, 1]")]
    InvalidOrder(f64),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("{model}: parameter `{param}` {reason}")]
    InvalidParameter {
        model: String,
        param: String,
        reason: String,
    },

    #[error("model spec parse error at position {position} near `{token}`: {message}")]
    SpecParse {
        token: String,
        position: usize,
        message: String,
    },

    #[error("probability level {0} outside the admissible range")]
    ProbabilityOutOfRange(f64),

    #[error("quantile density vanishes at u = {u}: hazard quantile is infinite")]
    InfiniteHazard { u: f64 },

    #[error("{what} did not converge (partial value {partial}, error estimate {error})")]
    Divergence { what: String, partial: f64, error: f64 },

    #[error("{what}: quantile value {value} at u = {u} is not positive")]
    NonPositiveQuantile { what: String, u: f64, value: f64 },

    #[error("transform derivative {value} at u = {u} is not positive")]
    NonMonotone { u: f64, value: f64 },

    #[error("closed form {closed} disagrees with quadrature {quadrature}")]
    ClosedFormMismatch { closed: f64, quadrature: f64 },

    #[error("sample needs at least 2 observations, got {0}")]
    SampleTooSmall(usize),

    #[error("sample value {value} at index {index} is negative")]
    NegativeObservation { index: usize, value: f64 },

    #[error("sample value at index {0} is not finite")]
    NonFiniteObservation(usize),

    #[error("sample is not sorted at index {0}")]
    UnsortedSample(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("row {row}: price {value} is not positive")]
    NonPositivePrice { row: usize, value: f64 },

    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of numerical convergence rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Divergence { .. } | Error::ClosedFormMismatch { .. })
    }

    pub(crate) fn param(model: &str, param: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            model: model.to_string(),
            param: param.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
