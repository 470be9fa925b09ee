use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("cone {0:?} is not smooth")]
    NonSmooth(Vec<usize>),
    #[error("polytope is not full-dimensional")]
    NotFullDim,
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("{0:?} is not a facet of {1:?}")]
    NotAFacet(Vec<usize>, Vec<usize>),
    #[error("polyhedron has a tail incompatible with the fan")]
    TailMismatch,
    #[error("polyhedron is not a lattice polyhedron in the required sense")]
    NonIntegral,
    #[error("objects live on different fans")]
    FanMismatch,
    #[error("invalid decoration: {}", .0.join("; "))]
    InvalidDecoration(Vec<String>),
    #[error("canonical stratification is not admissible")]
    NotCoarsenable,
    #[error("stratification exceeds the cap of {0} strata")]
    BlowUp(usize),
    #[error("materialisation is not positive")]
    NotPositive,
    #[error("fan carries no ample divisor")]
    NoAmpleAvailable,
    #[error("no twist up to {0} satisfies the required positivity")]
    CannotAmplify(u64),
    #[error("maps are not composable: {0}")]
    NotComposable(String),
    #[error("divisor is not nef")]
    NotNef,
    #[error("dimension {0} exceeds the cap {1}")]
    DimensionTooHigh(usize, usize),
    #[error("stratification does not have height one")]
    NotHeightOne,
    #[error("the natural map onto E is not surjective")]
    ANotSurjective,
    #[error("component polytope has a vertex outside the allowed set")]
    VertexLeak,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("nonzero cohomology on the shell outside the degree box at {0:?}")]
    ShellNonZero(Vec<i64>),
    #[error("methods disagree: {0}")]
    Mismatch(String),
}

impl Error {
    /// Exit code class: 1 schema, 2 precondition, 3 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 1,
            Error::Mismatch(_) | Error::ShellNonZero(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
