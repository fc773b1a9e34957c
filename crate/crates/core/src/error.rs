use alloc::string::String;

use thiserror::Error;

use crate::locations::{LocationId, WitnessError};
use crate::transport::{CodecError, TransportError};

/// A failure inside one party's local computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("no input left for prompt {prompt:?}")]
    InputExhausted { prompt: String },
    #[error("commitment check failed")]
    CommitmentCheckFailed,
    #[error("{0}")]
    Failed(String),
}

/// Why a run stopped. `step` is the number of effects the failing party had
/// performed, which locates the failure in its program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoreoError {
    #[error("{party} failed at step {step}: {error}")]
    Local {
        party: LocationId,
        step: usize,
        error: LocalError,
    },
    #[error("{party} hit a transport failure at step {step}: {error}")]
    Transport {
        party: LocationId,
        step: usize,
        error: TransportError,
    },
    #[error("{party} received an undecodable message from {from} at step {step}: {error}")]
    Decode {
        party: LocationId,
        from: LocationId,
        step: usize,
        error: CodecError,
    },
    #[error("invalid witness: {0}")]
    Witness(#[from] WitnessError),
}

impl ChoreoError {
    /// The party that reported the failure, when there is one.
    pub fn party(&self) -> Option<&LocationId> {
        match self {
            ChoreoError::Local { party, .. }
            | ChoreoError::Transport { party, .. }
            | ChoreoError::Decode { party, .. } => Some(party),
            ChoreoError::Witness(_) => None,
        }
    }

    pub fn local_error(&self) -> Option<&LocalError> {
        match self {
            ChoreoError::Local { error, .. } => Some(error),
            _ => None,
        }
    }
}
