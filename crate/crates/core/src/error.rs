use thiserror::Error;

/// Errors produced by constructors and block operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{divisor} does not divide {value}")]
    NotDivisible { divisor: usize, value: usize },

    #[error("invalid spectral window: {0}")]
    Window(String),

    #[error("invalid tap profile: {0}")]
    Profile(String),

    #[error("cyclic prefix: {0}")]
    CyclicPrefix(String),

    #[error("zero-forcing equalizer is singular: channel nulls every alias of bin {bin}")]
    SingularSubchannel { bin: usize },

    #[error("window and channel do not overlap: sum of |H_k C_k|^2 is zero")]
    ZeroOverlap,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
