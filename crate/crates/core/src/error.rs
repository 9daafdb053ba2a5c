use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("tangent vector is based at a different point")]
    BaseMismatch,

    #[error("subspace is not isotropic (max |omega(b_i, b_j)| = {defect:e})")]
    NotIsotropic { defect: f64 },

    #[error("subspace dimensions differ: {left} vs {right}")]
    SubspaceDimMismatch { left: usize, right: usize },

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("operation requires a closed curve")]
    OpenCurve,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("root finding did not converge after {iterations} iterations (residual {residual:e}, bracket width {width:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        width: f64,
    },

    #[error("knots {i} and {j} violate the Lipschitz bound: d_cc / dist = {ratio} > L = {bound}")]
    LipschitzViolation {
        i: usize,
        j: usize,
        ratio: f64,
        bound: f64,
    },

    #[error("invalid knot data: {0}")]
    InvalidKnots(String),

    #[error("duplicate domain points at samples {0} and {1}")]
    DuplicateDomainPoint(usize, usize),

    #[error("grid index {0:?} is not interior")]
    BoundaryIndex(Vec<usize>),

    #[error("loop of radius {radius} around {index:?} leaves the sampling box")]
    CircleOutsideBox { index: Vec<usize>, radius: f64 },

    #[error("map is constant at every sampled scale; Hölder exponent undefined")]
    DegenerateMap,

    #[error("degenerate point cloud: {0}")]
    DegenerateCloud(String),

    #[error("rank structure violated: {violations} contact points with numeric rank above {j}")]
    RankStructure { j: usize, violations: usize },

    #[error("the covering theorem needs k > n (got k = {k}, n = {n}): lower-dimensional domains can map onto sets of positive measure")]
    HypothesisViolation { k: usize, n: usize },

    #[error("invalid sampled map: {0}")]
    InvalidMap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether this error comes from a numerical procedure failing to converge
    /// rather than from invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
