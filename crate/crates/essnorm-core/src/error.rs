use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected m = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for dimension {m}")]
    AxisOutOfRange { axis: usize, m: usize },

    #[error("empty set has no corner")]
    EmptySetCorner,

    #[error("unit monomial has empty zero set")]
    UnitMonomialZeroSet,

    #[error("weight undefined at {alpha:?}")]
    WeightUndefined { alpha: Vec<u32> },

    #[error("invalid weight table: {0}")]
    InvalidWeightTable(String),

    #[error("generator vector must be nonzero (generator {index})")]
    ZeroGeneratorVector { index: usize },

    #[error("at most 64 generators are supported, got {0}")]
    TooManyGenerators(usize),

    #[error("operator displacement is not a single coordinate step")]
    NonUnitDisplacement,

    #[error("truncation degree must be at least 2, got {0}")]
    TruncationTooSmall(u32),

    #[error("dense truncation exceeds the size guard (requested degree {degree}, m = {m})")]
    SizeGuardExceeded { degree: u32, m: usize },

    #[error("finite-rank tail: no positive shell sums in the fit window")]
    FiniteRankTail,

    #[error("fit window has fewer than {min} usable shells ({got})")]
    WindowTooSmall { min: usize, got: usize },

    #[error("shell sum overflowed at shell {shell}")]
    Overflow { shell: u32 },

    #[error("quotient counts did not stabilize below the shell cap {cap}")]
    NoStabilization { cap: u32 },

    #[error(
        "dimension readings disagree: finite differences give {finite_difference}, \
         block decomposition gives {blocks}"
    )]
    DimensionReadingsDisagree {
        finite_difference: usize,
        blocks: usize,
    },

    #[error("corner reduction is only defined for m = 2 (got m = {0}); use reduce_axis instead")]
    CornerReduceDimension(usize),

    #[error("cofinite difference is infinite along axis {axis}")]
    InfiniteDefect { axis: usize },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
