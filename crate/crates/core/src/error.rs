use thiserror::Error;

/// Errors raised while loading, validating or analysing a Markov semigroup.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator {generator} is not stochastic at row {row}: {detail}")]
    NonStochastic {
        generator: usize,
        row: usize,
        detail: String,
    },

    #[error("generators {left} and {right} do not commute (max |AB - BA| = {deviation:e}); right amenability cannot be certified")]
    NonAbelian {
        left: usize,
        right: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state space of size {n} exceeds the enumeration limit {limit}; use the minimal self-supporting sets instead")]
    TooLarge { n: usize, limit: usize },

    #[error("set is not self-supporting: edge {from} -> {to} leaves it")]
    NotSelfSupporting { from: usize, to: usize },

    #[error("empty set is not self-supporting")]
    EmptySupport,

    #[error("stationary space on minimal class {support:?} has affine dimension {dimension}")]
    NonUniqueOnMinimalClass { support: Vec<usize>, dimension: usize },

    #[error("measure is not an invariant probability (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("ergodic net did not converge before N = {n_max} (residual {residual:e})")]
    NotConverged { n_max: u64, residual: f64 },

    #[error("mean ergodic decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("operation needs exactly one generator, found {0}")]
    MultiGenerator(usize),

    #[error("generator is not a Koopman (0/1 deterministic) matrix at row {row}")]
    NotKoopman { row: usize },

    #[error("state {value} out of range for n = {n}")]
    OutOfRange { value: usize, n: usize },

    #[error("affine branch {index} has slope 0")]
    DegenerateBranch { index: usize },

    #[error("invalid Ulam specification: {0}")]
    InvalidUlam(String),

    #[error("kernel of the empty family is the full algebra")]
    EmptyFamily,

    #[error("support {0:?} contains no ergodic support")]
    NoErgodicInside(Vec<usize>),

    #[error("function is not fixed on the minimal center (residual {residual:e})")]
    NotFixed { residual: f64 },

    #[error("function is not constant on ergodic support {support:?} (spread {spread:e})")]
    NotConstantOnSupport { support: Vec<usize>, spread: f64 },

    #[error("mean projection unavailable: {0}")]
    ProjectionUnavailable(String),

    #[error("computed conditions contradict the mean ergodicity equivalences: {0}")]
    EquivalenceViolation(String),

    #[error("correspondence check failed: {0}")]
    Inconsistent(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged { .. }
            | Error::DecompositionFailure(_)
            | Error::NonUniqueOnMinimalClass { .. }
            | Error::NotConstantOnSupport { .. }
            | Error::ProjectionUnavailable(_)
            | Error::EquivalenceViolation(_)
            | Error::Inconsistent(_)
            | Error::NoErgodicInside(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
