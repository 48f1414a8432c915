use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not a prime below 2^31")]
    InvalidPrime(u64),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("boundary maps do not compose to zero at degree {0}")]
    NotAComplex(usize),

    #[error("cover relation {0} < {1} creates a cycle")]
    CyclicCovers(String, String),

    #[error("cover relation {0} < {1} is implied by transitivity")]
    RedundantCover(String, String),

    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),

    #[error("unknown element {0:?}")]
    UnknownElement(String),

    #[error("duplicate element {0:?}")]
    DuplicateElement(String),

    #[error("{0} and {1} are comparable")]
    NotAnAntichain(String, String),

    #[error("poset is not an upper semilattice: {0} and {1} have no join")]
    NotSemilattice(String, String),

    #[error("{0} does not lie below {1}")]
    NotComparable(String, String),

    #[error("size bound exceeded: more than {0} elements")]
    SizeBoundExceeded(usize),

    #[error("functoriality fails along {0} <= {1} <= {2}")]
    FunctorialityViolation(String, String, String),

    #[error("naturality fails on cover {0} < {1}")]
    NaturalityViolation(String, String),

    #[error("lower set does not lie inside upper set")]
    InvalidSpread,

    #[error("module is not isomorphic to a subfunctor of the constant functor")]
    NotSubfunctor,

    #[error("{0} and {1} have a common lower bound but no meet")]
    MeetHypothesisFailed(String, String),

    #[error("collection is not thin at ({0}, {1})")]
    NotThin(String, String),

    #[error("collection is not flat at ({0}, {1})")]
    NotFlat(String, String),

    #[error("object at {0} is zero")]
    ZeroObject(String),

    #[error("degeneracy hypothesis fails: element {1} in the join closure for {0} has a nonzero object")]
    HypothesisNotVerified(String, String),

    #[error("resolution not finished by degree {0}")]
    DmaxReached(usize),

    #[error("{0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
