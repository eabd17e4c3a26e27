//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to load {file}: {reason}")]
    Load { file: PathBuf, reason: String },

    #[error("dimension mismatch in {context}: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        context: String,
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("no input frames found in {dir}")]
    EmptyInput { dir: PathBuf },

    #[error("expected a {expected:?} frame, got {got:?}")]
    KindMismatch {
        expected: crate::imagery::FrameKind,
        got: crate::imagery::FrameKind,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("roi or crop rectangle out of bounds: {0}")]
    Bounds(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("insufficient sequence: {0}")]
    InsufficientSequence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("mcmc did not converge: max split R-hat {rhat:.4} exceeds {threshold}")]
    Convergence { rhat: f64, threshold: f64 },

    #[error("histogram normalization failed: {0}")]
    Normalization(String),

    #[error("insufficient boundary data for inpainting: {0}")]
    InsufficientBoundary(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("pipeline stage '{stage}'{} failed: {source}", frame.map(|f| format!(" (frame {f})")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        frame: Option<usize>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code: 2 validation, 3 i/o, 4 numeric/convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Bounds(_) | Error::KindMismatch { .. } | Error::Scenario(_) => 2,
            Error::Io { .. } | Error::Load { .. } | Error::EmptyInput { .. } => 3,
            Error::DimensionMismatch { .. } | Error::InsufficientSequence(_) => 2,
            Error::DegenerateGeometry(_)
            | Error::Domain(_)
            | Error::DegenerateSamples(_)
            | Error::Convergence { .. }
            | Error::Normalization(_)
            | Error::InsufficientBoundary(_) => 4,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str, frame: Option<usize>) -> Error {
        Error::Stage {
            stage,
            frame,
            source: Box::new(self),
        }
    }
}
