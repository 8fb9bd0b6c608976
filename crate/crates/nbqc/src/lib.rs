//! File formats, simulation and command-line front end for `nbqc-core`.

pub mod cli;
pub mod descriptor;
pub mod formats;
pub mod simulator;

pub use nbqc_core as core;

use nbqc_core::ace_opt::OptError;
use nbqc_core::codec::CodecError;
use nbqc_core::gf2m::FieldError;
use nbqc_core::protograph::ProtoError;
use nbqc_core::qclift::LiftError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("descriptor verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proto(#[from] ProtoError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Opt(#[from] OptError),
}

impl Error {
    /// Process exit status: 2 when a constraint could not be met, 3 for
    /// anything wrong with the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Opt(OptError::Failed(_)) => 2,
            _ => 3,
        }
    }
}
