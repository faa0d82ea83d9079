use thiserror::Error;

/// Errors raised by the prime-distribution toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: expected {lo} < {hi}")]
    RangeOrder { lo: u64, hi: u64 },

    #[error("segment of {len} flags exceeds the configured cap of {cap}")]
    SegmentTooLarge { len: u64, cap: u64 },

    #[error("value {value} exceeds the supported maximum {max}")]
    OutOfRange { value: u64, max: u64 },

    #[error("modulus {k} and residue {l} are not coprime")]
    NotCoprime { k: u64, l: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} requires x >= {min}, got {x}")]
    BelowThreshold {
        what: &'static str,
        x: f64,
        min: f64,
    },

    #[error("quadrature could not reach tolerance {tol:e} (best error bound {achieved:e} after {evaluations} evaluations)")]
    ToleranceUnachievable {
        tol: f64,
        achieved: f64,
        evaluations: usize,
    },

    #[error("model/class mismatch: {0}")]
    ModelMismatch(&'static str),

    #[error("work bound exceeded: {0}")]
    WorkBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
