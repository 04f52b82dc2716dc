use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite coordinate in point {index}")]
    NonFinite { index: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("point count {0} is odd; a perfect matching needs an even number of points")]
    OddPointCount(usize),

    #[error("instance too large for exhaustive search: {found} points, limit {limit}")]
    TooLarge { limit: usize, found: usize },

    #[error("vertex index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cost function: {0}")]
    InvalidCostFunction(String),

    #[error("active term {index} is not differentiable at the minimizer")]
    NondifferentiableActive { index: usize },

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("edge ({0}, {1}) has its midpoint at the minimizer")]
    DegenerateMidpoint(usize, usize),

    #[error("tangent radii of edge ({edge:?}) violate r_a + r_b = |a - b| by {residual:e}")]
    TangentIdentity { edge: (usize, usize), residual: f64 },

    #[error("no alternating cycle found: {0}")]
    NoCycleFound(String),

    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),

    #[error("iteration limit {0} reached without an open certificate")]
    IterationLimit(usize),

    #[error("point does not lie on the required segment (distance {distance:e})")]
    NotOnSegment { distance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
