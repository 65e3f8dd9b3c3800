use thiserror::Error;

use crate::params::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("incompatible domain: {0}")]
    IncompatibleDomain(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("spectrum is not Hermitian: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NonHermitianSpectrum { residue: f64, tolerance: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("stage solve diverged after {iterations} sweeps (residual {residual:e})")]
    StageSolveDiverged { iterations: usize, residual: f64 },
    #[error("integration aborted at t = {t}: {source}")]
    Aborted {
        t: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("center lies on the loop")]
    CenterOnLoop,
    #[error("winding sum {0} is not an integer")]
    NonInteger(f64),
    #[error("center lies on the track")]
    CenterOnTrack,
    #[error("degenerate loop: all points coincide")]
    DegenerateLoop,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error at line {line} ({key}): {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("no snapshot at t = {0}")]
    MissingSnapshot(f64),
    #[error("malformed {file}: {message}")]
    Malformed { file: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
