use thiserror::Error;

/// Errors raised by the exact-arithmetic and graph-sum layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclotomic conductor mismatch: {left} vs {right}")]
    ConductorMismatch { left: u32, right: u32 },

    #[error("series has a nonzero constant term; exp is undefined")]
    NonzeroConstantTerm,

    #[error("series is not divisible by (z+zeta): coefficient of z^{z_exp} zeta^{zeta_exp} leaves remainder {remainder}")]
    NotDivisible {
        z_exp: u32,
        zeta_exp: u32,
        remainder: String,
    },

    #[error("series variable mismatch")]
    VariableMismatch,

    #[error("invalid orbifold data: {0}")]
    InvalidOrbifold(String),

    #[error("s-coefficients are indexed from k = 1 (got k = 0)")]
    ZeroSIndex,

    #[error("dilaton leaves need height >= 2 (got {0})")]
    DilatonHeight(u32),

    #[error("truncation order {order} is too small for height {needed}")]
    TruncationTooSmall { order: u32, needed: u32 },

    #[error("potential key is outside the computed bounds: {0}")]
    OutOfBounds(String),

    #[error("quantized operator did not stabilize within depth {depth}")]
    NotStabilized { depth: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
