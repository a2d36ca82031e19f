use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("order exhausted: difference order {requested:?} needs more than {available:?} net entries")]
    OrderExhausted {
        requested: [usize; 2],
        available: [usize; 2],
    },
    #[error("sequence of length {len} cannot support difference order {order}")]
    Length { len: usize, order: usize },
    #[error("near-coincident poles {first} and {second}; merge them first")]
    NearCoincidentPoles { first: f64, second: f64 },
    #[error("coincident roots {first} and {second} after cancellation")]
    CoincidentRoots { first: f64, second: f64 },
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("zero root where a positive root is required")]
    ZeroRoot,
    #[error("index {index} out of range 1..={len}")]
    Index { index: usize, len: usize },
    #[error("ordering violated: need {lower} < {upper}")]
    Ordering { lower: f64, upper: f64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("series for nu={nu}, z={z} not converged after {terms} terms")]
    SeriesTruncation { nu: f64, z: f64, terms: usize },
    #[error("argument z={z} beyond the series cap {cap}")]
    Overflow { z: f64, cap: f64 },
    #[error("measure has neither atoms nor density")]
    EmptyMeasure,
    #[error("quadrature did not converge: coarse error {coarse:e}, refined error {fine:e}")]
    QuadratureNonconvergence { coarse: f64, fine: f64 },
    #[error("weights do not commute: staircase paths disagree by {defect:e} at {alpha:?}")]
    CommutationViolation { alpha: [usize; 2], defect: f64 },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
