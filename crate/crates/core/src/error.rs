use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable context mismatch: {0}")]
    Context(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    Hermitian(f64),
    #[error("outside operation domain: {0}")]
    Domain(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("inconsistent affine constraints (residual {0:.3e})")]
    InfeasibleAffine(f64),
    #[error("point is not in the domain of the realization")]
    NotInDomain,
    #[error("polynomial is not symmetric: {0}")]
    Symmetry(String),
    #[error("realization is not minimal: {0}")]
    Minimality(String),
    #[error("realizations are not equivalent: {0}")]
    NotEquivalent(String),
    #[error("symmetrization failed: {0}")]
    Symmetrization(String),
    #[error("point (A,0) is not in the domain")]
    Kebab,
    #[error("not convexible in x: {0}")]
    NotConvexible(String),
    #[error("realization error: {0}")]
    Realization(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("region is empty after {0} attempts")]
    RegionEmpty(usize),
    #[error("span saturation failed: reached {achieved} of {target}")]
    SpanFailure { achieved: usize, target: usize },
    #[error("invalid xy-pair (residual {0:.3e})")]
    Pair(f64),
    #[error("certificate assembly failed: {0}")]
    Assembly(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
