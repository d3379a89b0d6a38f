use thiserror::Error;

/// Errors raised by model construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mixture has no components")]
    EmptyMixture,

    #[error("mixture weight {weight} at index {index} is not strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("mixture weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("`{0}` does not have full support on the real line")]
    BoundedSupport(String),

    #[error("wrong number of parameters for {kind}: expected {expected}, got {got}")]
    ParameterCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("signal pair fails the monotone likelihood ratio check (min slope {min_slope:e})")]
    MlrpViolated { min_slope: f64 },

    #[error("densities of the signal pair never cross on the search grid")]
    NoCrossing,

    #[error("signal pair is not normalized (density crossing at {crossing})")]
    NotNormalized { crossing: f64 },

    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),

    #[error("operation requires a strictly positive reward, got {0}")]
    NonPositiveReward(f64),

    #[error("parameter box: {0}")]
    InvalidBox(String),

    #[error("parameter x[{index}] = {value} lies outside [{lower}, {upper}]")]
    OutOfBox {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("parameter vector has dimension {got}, family expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mixture weight {weight} at index {index} is not strictly positive")]
    DegenerateWeights { index: usize, weight: f64 },

    #[error("numeric guardrail failed: {0}")]
    VerificationFailed(String),

    #[error("cost family is not certified responsive")]
    CertificateMissing,

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid search window: {0}")]
    InvalidWindow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of a numeric self-check, as opposed to bad input.
    pub fn is_guardrail(&self) -> bool {
        matches!(self, Error::VerificationFailed(_))
    }
}
