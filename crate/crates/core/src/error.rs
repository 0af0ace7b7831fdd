use thiserror::Error;

use crate::spectral::Parity;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid dimensions must be even and at least 4, got {nx}x{ny}x{nz}")]
    InvalidGrid { nx: usize, ny: usize, nz: usize },
    #[error("expected {expected} samples, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected parity {expected:?}, got {got:?}")]
    ParityMismatch { expected: Parity, got: Parity },
    #[error("vertical mean {max_abs:e} exceeds tolerance {tol:e}; integral from z=0 is not periodic")]
    NonzeroVerticalMean { max_abs: f64, tol: f64 },
    #[error("right-hand side mean {mean:e} exceeds tolerance {tol:e}; elliptic problem is not solvable")]
    NonzeroMeanRHS { mean: f64, tol: f64 },
    #[error("density {value} is not positive")]
    NonpositiveDensity { value: f64 },
    #[error("density range [{min}, {max}] leaves ({lower}, {upper})")]
    DensityOutOfBounds { min: f64, max: f64, lower: f64, upper: f64 },
    #[error("time step {dt:e} exceeds the stable bound {limit:e}")]
    CFLViolation { dt: f64, limit: f64 },
    #[error("states are at different times ({0} vs {1})")]
    TimeMismatch(f64, f64),
    #[error("need at least {needed} entries, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("time samples are not uniformly spaced (relative deviation {0:e})")]
    NonuniformSpacing(f64),
    #[error("non-positive value {0} in log-log data")]
    NonpositiveData(f64),
    #[error("unknown initial-condition family `{0}`")]
    UnknownFamily(alloc::string::String),
    #[error(
        "initial velocity is not compatible: |∫v| = {momentum:e}, max|div_h v̄| = {divergence:e}, tolerance {tol:e}"
    )]
    Incompatible { momentum: f64, divergence: f64, tol: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(alloc::string::String),
}
