//! Crate-wide error type.
//!
//! Numeric payloads are reported as `f64` regardless of the working scalar
//! type so the error enum stays object-simple and printable everywhere.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {dim} unsupported (expected {expected})")]
    BadDimension { dim: usize, expected: &'static str },

    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("state is not normalized: |psi| = {norm:.17}")]
    NotNormalized { norm: f64 },

    #[error("not a density matrix: {reason} (value {value:.3e})")]
    BadDensityMatrix { reason: &'static str, value: f64 },

    #[error("gapless mode at k = {k:.17}: post-quench energy {energy:.3e} below tolerance")]
    GaplessMode { k: f64, energy: f64 },

    #[error("invalid model parameters: {reason}")]
    BadParams { reason: String },

    #[error("invalid momentum grid: {reason}")]
    BadGrid { reason: String },

    #[error("momentum k = {k:.17} is not a critical root: |condition| = {condition:.3e}")]
    NotCritical { k: f64, condition: f64 },

    #[error("invalid sweep configuration: {reason}")]
    BadSweepConfig { reason: String },

    #[error("momentum grid is empty after skipping gapless modes")]
    EmptyGrid,

    #[error("time grid is not uniform: max spacing deviation {deviation:.3e}")]
    NonUniformTimeGrid { deviation: f64 },

    #[error("time samples are empty")]
    EmptyTimeGrid,

    #[error("oracle internal consistency failure: {reason} (value {value:.3e})")]
    OracleInconsistent { reason: &'static str, value: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
