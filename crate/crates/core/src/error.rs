use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("size {n} outside supported range 1..={max}")]
    SizeLimit { n: usize, max: usize },
    #[error("malformed partition of {{1..{n}}}: {reason}")]
    Malformed { n: usize, reason: String },
    #[error("partition is crossing")]
    Crossing,
    #[error("colored word must contain at least one letter")]
    EmptyWord,
    #[error("integer overflow computing {what}")]
    Overflow { what: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CumulantError {
    #[error("sequence order must be at least 1")]
    EmptySequence,
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("requested order {needed} exceeds truncation order {available}")]
    Truncation { needed: usize, available: usize },
    #[error("unknown variable label {0}")]
    UnknownLabel(String),
    #[error("free family members have mismatched truncation orders")]
    OrderMismatch,
    #[error("exponents must be at least 1")]
    ZeroExponent,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series domain error: {0}")]
    Domain(&'static str),
    #[error("S-transform undefined: first moment is zero")]
    SUndefined,
    #[error("input is not normalized: {0}")]
    Normalization(&'static str),
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("negative rate")]
    NegativeRate,
    #[error(transparent)]
    Cumulant(#[from] CumulantError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("spectral argument must lie in the upper half-plane (Im z = {0})")]
    NotUpperHalfPlane(f64),
    #[error("inverted density is negative ({value:e}) at t = {t}")]
    NegativeDensity { t: f64, value: f64 },
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("density mass {mass} deviates from 1 by more than {tolerance}")]
    Unnormalized { mass: f64, tolerance: f64 },
    #[error("free entropy diverges: measure has an atom near t = {t}")]
    Divergent { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("letter {letter} outside 1..={letters}")]
    Letter { letter: usize, letters: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("polynomial degree {degree} exceeds truncation depth {depth}")]
    Truncation { degree: usize, depth: usize },
    #[error("constant coefficient must be nonzero")]
    ZeroConstant,
}

#[derive(Debug, Error)]
pub enum RmtError {
    #[error("invalid ensemble: {0}")]
    Validation(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("eigendecomposition failed")]
    Eigen,
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
