use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ket dimension must be at least 1")]
    EmptyKet,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("joint dimension {0} is not a multiple of 4 (probe x photon pair)")]
    NotPairJoint(usize),

    #[error("operator of shape {rows}x{cols} cannot hold {len} entries")]
    OperatorShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("expected a normalized ket, squared norm is {0}")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("Bell index {0} is not in 0..=3")]
    InvalidBellIndex(usize),

    #[error("source state is not normalized: sum of probe norms misses 1 by {deficit}")]
    SourceNormalization { deficit: f64 },

    #[error("channel attack violates unitarity, residuals {0:?}")]
    NotUnitary([f64; 3]),

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot merge run statistics: {0}")]
    IncompatibleStats(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}
