use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("sphere grid too coarse for L_max = {l_max}: {reason}")]
    InsufficientResolution { l_max: usize, reason: String },

    #[error("grid spacing {spacing} too coarse to resolve the cutoff annulus (max {max})")]
    GridTooCoarse { spacing: f64, max: f64 },

    #[error("complex time outside the closed sector: {0}")]
    OutsideSector(String),

    #[error("singular kernel evaluation (x = y)")]
    SingularKernel,

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("Krylov solver stalled after {iterations} iterations (relative residual {residual:e})")]
    KrylovStalled { iterations: usize, residual: f64 },

    #[error("Picard iteration diverged after {iterations} iterations")]
    PicardDiverged { iterations: usize },

    #[error("blow-up guard tripped at t = {t}: sup norm {sup:e}")]
    BlowUp { t: f64, sup: f64 },

    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
