use thiserror::Error;

use crate::scalar::Backend;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdhmError {
    #[error("operation not supported by the {0} backend")]
    UnsupportedBackend(Backend),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("points must be pairwise distinct (index {0} repeats an earlier point)")]
    DuplicatePoint(usize),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: i64, max: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no chart has an invertible A2m (the pencil is singular)")]
    NoChart,
    #[error("data is not in chart {0} (A2m is singular)")]
    NotInChart(usize),
    #[error("A2m is singular")]
    SingularA2m,
    #[error("chart triple is not co-stable")]
    NotCostable,
    #[error("triple is not in the overlap of charts {from} and {to}")]
    NotInOverlap { from: usize, to: usize },
    #[error("joint spectrum is not simple")]
    NonSimpleSpectrum,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("representation has a nonzero framing map f")]
    NonzeroFraming,
    #[error("enumeration needs {needed} subspace pairs, budget is {budget}")]
    TooLarge { needed: u128, budget: u128 },
    #[error("monad cannot be normalized: step {step} pivot is singular")]
    NotNormalizable { step: u8 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = AdhmError> = std::result::Result<T, E>;
