use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("substitution produced an identically zero denominator")]
    ZeroDenominator,

    #[error("evaluation too close to a pole (|den| = {magnitude:e})")]
    NearPole { magnitude: f64 },

    #[error("unbound variable `{0}` in numeric evaluation")]
    UnboundVariable(String),

    #[error("truncated series vanish to order {order}; increase the order")]
    IncreaseOrder { order: usize },

    #[error("series inversion needs a nonzero constant term")]
    SeriesNotUnit,

    #[error("unexpected variable `{0}`")]
    UnexpectedVariable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular over the fraction field")]
    Singular,

    #[error("mixed exact/numeric operands")]
    MixedMode,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("highest-weight vector is not preserved up to a scalar")]
    NotNormalizable,

    #[error("limit vanishes; pole order {order} does not match")]
    OrderMismatch { order: usize },

    #[error("entry has a pole of order {found} exceeding requested order {order}")]
    PoleTooHigh { order: usize, found: usize },

    /// Zero-based vertex, displayed one-based.
    #[error("vertex {} is frozen", .0 + 1)]
    FrozenVertex(usize),

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid chamber: {0}")]
    InvalidChamber(String),

    #[error("stable envelope for p{column} not unique (solution space dimension {dim})")]
    Uniqueness { column: usize, dim: usize },

    #[error("no Q-polynomial of degree {degree}")]
    NoQ { degree: usize },

    #[error("Q-polynomial not unique (null space dimension {dim})")]
    DegenerateQ { dim: usize },

    #[error("eigenvector overlap {overlap:.3} below 0.5 while matching branches; resample")]
    BranchMatch { overlap: f64 },

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("genericity violated: {0}")]
    Genericity(String),

    #[error("invalid input: {0}")]
    InvalidSpec(String),

    #[error("no substitution data for index {0}")]
    UncoveredIndex(usize),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
