use thiserror::Error;

/// Errors surfaced by model construction and the class calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Caller passed inconsistent or malformed input.
    #[error("usage error: {0}")]
    Usage(String),

    /// One of the ampleness conditions behind the Fano criterion failed.
    #[error("ample test failed: {condition}")]
    NotFano {
        condition: String,
        /// Ordered pair (i, j), 1-based, for Construction A; absent for B.
        pair: Option<(usize, usize)>,
    },

    /// Construction B needs a non-trivial twist.
    #[error("twist divisor N must be non-zero")]
    ZeroTwist,

    /// A double cover precondition does not hold.
    #[error("model error: {0}")]
    Model(String),

    /// Integer pair outside the admissible range |a|, |b|, |a - b| <= i_T - 1.
    #[error("pair ({a}, {b}) out of range for index {index}")]
    OutOfRange { index: i64, a: i64, b: i64 },

    #[error("cone is not pointed")]
    NotPointed,

    #[error("cone generators do not span the ambient space (rank {rank} < {dim})")]
    NotFullDimensional { rank: usize, dim: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
