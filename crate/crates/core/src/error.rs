use thiserror::Error;

/// Errors for measure construction and frame computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: at least one point or component is required")]
    Empty,

    #[error("weights must sum to 1 (within 1e-6): sum={sum}")]
    WeightSum { sum: f64 },

    #[error("negative weight at index {index}: {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("point {index} has dimension {actual}, expected {expected}")]
    PointDim {
        index: usize,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is not symmetric: max asymmetry {deviation}")]
    NotSymmetric { deviation: f64 },

    #[error("matrix is not positive semi-definite: min eigenvalue {min_eigenvalue}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("sample count must be at least 1")]
    ZeroSampleCount,

    #[error("frame operator is rank-deficient: rank {rank} < dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("measure is not tight: bounds [{lower}, {upper}]")]
    NotTight { lower: f64, upper: f64 },

    #[error("point {index} is off the unit sphere: norm {norm}")]
    OffSphere { index: usize, norm: f64 },

    #[error("weights are not uniform (required for the permutation oracle)")]
    NonUniformWeights,

    #[error("cardinality mismatch: {left} vs {right}")]
    CardinalityMismatch { left: usize, right: usize },

    #[error("permutation search limited to {limit} points, got {size}")]
    PermutationLimit { size: usize, limit: usize },

    #[error("zero vector at index {index} cannot be normalized")]
    ZeroVector { index: usize },

    #[error("epsilon must lie strictly inside (0, 1): {eps}")]
    EpsilonRange { eps: f64 },

    #[error("result support would have {size} points, over the {limit} limit")]
    SupportTooLarge { size: usize, limit: usize },

    #[error("product measure requires a zero-mean factor: mean norms {left} and {right}")]
    NoZeroMeanFactor { left: f64, right: f64 },

    #[error("unsupported measure combination: {0}")]
    UnsupportedPair(&'static str),

    #[error("points do not span the space: rank {rank} < dimension {dim}")]
    NotSpanning { rank: usize, dim: usize },

    #[error("no convergence after {iterations} iterations: residual {residual}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("at least 2 trials are needed for a standard error, got {trials}")]
    TooFewTrials { trials: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
