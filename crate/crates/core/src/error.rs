use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the forward model, the inversion pipeline and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate mode system (n = {n}, |det| = {det:e})")]
    DegenerateModeSystem { n: i64, det: f64 },

    #[error("kernel denominator underflow at mode n = {n}")]
    KernelDenominatorUnderflow { n: i64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sample point outside domain (r = {r})")]
    OutsideDomain { r: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("imaging map empty: every sampling point is degenerate")]
    ImagingMapEmpty,

    #[error("unidentifiable: zero-contrast data")]
    ZeroContrast,

    #[error("parameter fit did not converge after {iterations} iterations (best residual {residual:e})")]
    FitDiverged {
        iterations: usize,
        residual: f64,
        best: crate::parameters::FitResult,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
