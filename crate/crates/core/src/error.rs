use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),

    #[error("form construction failed verification: {0}")]
    Construction(String),

    #[error("odd norm {0}: an even form represents only even numbers")]
    OddNorm(i64),

    #[error("invalid Fourier index: {0}")]
    InvalidIndex(String),

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("incompatible expansions: {0}")]
    Incompatible(String),

    #[error("resource budget exceeded: {used} nodes > {budget}")]
    BudgetExceeded { used: u64, budget: u64 },

    #[error("shell of norm {norm} has {size} vectors, above the limit {limit}")]
    ShellTooLarge { norm: i64, size: u64, limit: usize },

    #[error("coefficient overflow while counting")]
    Overflow,

    #[error("near-singular matrix (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("not symplectic: deviation {0:.3e}")]
    NotSymplectic(f64),

    #[error("invalid Siegel point: {0}")]
    InvalidPoint(String),

    #[error("weight mismatch: expansion has weight {expansion}, requested {requested}")]
    WeightMismatch { expansion: String, requested: u32 },

    #[error("invalid genus: {0}")]
    InvalidGenus(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
