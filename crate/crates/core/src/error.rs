use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} outside the supported range 1..={max}")]
    QubitCountOutOfRange { n: usize, max: usize },

    #[error("index {index} out of range (must be below {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    WrongTrace { trace: f64 },

    #[error("not a state: smallest eigenvalue is {min_eigenvalue:e}")]
    NotAState { min_eigenvalue: f64 },

    #[error("identity coefficient is {found}, expected {expected}")]
    WrongNormalization { found: f64, expected: f64 },

    #[error(
        "Kraus set is not trace-decreasing: largest eigenvalue of sum A^dag A is {max_eigenvalue}"
    )]
    NotTraceDecreasing { max_eigenvalue: f64 },

    #[error("transfer matrix has an imaginary residue of {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("rotation block is not special orthogonal (orthogonality deviation {deviation:e}, determinant {determinant})")]
    NotRotation { deviation: f64, determinant: f64 },

    #[error("map is not completely positive: smallest Choi eigenvalue is {min_eigenvalue:e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("trace-preserving gate must have first row (1, 0, ..., 0); deviation {deviation:e}")]
    NotTracePreserving { deviation: f64 },

    #[error("invalid projector set: {0}")]
    InvalidProjectorSet(String),

    #[error(
        "projector set is incomplete (sum of projectors differs from identity by {deviation:e})"
    )]
    IncompleteProjectorSet { deviation: f64 },

    #[error("branch has zero probability (weight {weight:e})")]
    ZeroProbabilityBranch { weight: f64 },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("logic value {0} outside 0..=3")]
    ValueOutOfRange(i64),

    #[error("invalid targets: {0}")]
    InvalidTargets(String),

    #[error("empty Kraus set")]
    EmptyKrausSet,

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}
