use thiserror::Error;

/// Errors surfaced by set, slope and construction operations.
///
/// Variants map one-to-one onto the failure modes of the public API; the
/// CLI turns `ResourceLimit` into exit code 2 and everything else into 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a set must contain at least one element")]
    EmptySet,

    #[error("ratio set requested but the divisor set contains 0")]
    DivisorZero,

    #[error("multiplicative energy is undefined when 0 is an element")]
    ZeroInMultiplicativeEnergy,

    #[error("set is not well-spaced: needs positive elements with pairwise gaps >= 1")]
    NotWellSpaced,

    #[error("operation needs a strictly positive set")]
    SignRestriction,

    #[error("operation is degenerate on a singleton set")]
    Degenerate,

    #[error("invalid line pair: {0}")]
    InvalidPair(String),

    #[error("invalid slope quadruple: {0}")]
    InvalidQuadruple(String),

    #[error("cluster half-width {m} out of range: need 2 <= 2M <= {slopes} slopes")]
    InvalidClusterWidth { m: usize, slopes: usize },

    #[error("no primorial q satisfies q^2 < {0}; need n >= 5")]
    NoValidPrimorial(u64),

    #[error("fewer than {needed} qualifying integers in [1, {limit}] at threshold {theta}")]
    DensityFailure { needed: u64, limit: u64, theta: f64 },

    #[error("memory budget exceeded: {0}")]
    ResourceLimit(String),

    #[error("exponent fit needs at least 3 positive data points, got {0}")]
    InsufficientData(usize),

    #[error("line {line}: {msg}")]
    InputFormat { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
