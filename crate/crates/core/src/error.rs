use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("reduced energy must be finite and non-negative, got {0}")]
    InvalidEpsilon(f64),

    #[error("a unit cell needs at least one coupling")]
    EmptyCell,

    #[error("subset size {m} is outside 1..={n}")]
    InvalidSubsetSize { n: usize, m: usize },

    #[error("closed form only exists for N in {{2, 3, 4}}, got N = {0}")]
    UnsupportedCellSize(usize),

    #[error("cell is not PT-ordered")]
    NotPtOrdered,

    #[error("{0}")]
    InvalidCellSpec(String),

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("N Q a = {0} is outside [0, pi]")]
    InvalidWavevector(f64),

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("eps = {eps} is outside the allowed bands (B = {b})")]
    OutOfBand { eps: f64, b: f64 },

    #[error("eps = {eps} sits on a band edge (B = {b}); Bloch eigenvectors are degenerate")]
    BandEdge { eps: f64, b: f64 },

    #[error("envelope undefined at eps = {eps}: F vanishes")]
    EnvelopeDomain { eps: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
