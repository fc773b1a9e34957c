//! The backend contract and the value codec.
//!
//! Backends move opaque text payloads between parties with per-pair FIFO
//! order. Concrete backends (in-memory, TCP) live in the `census-net` crate;
//! this module only fixes the interface so projected programs can run on
//! any of them.

use alloc::string::{String, ToString};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::locations::LocationId;

/// Failures reported by a backend.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("timed out waiting for a message from {from}")]
    Timeout { from: LocationId },
    #[error("{peer} aborted its run")]
    PeerAborted { peer: LocationId },
    #[error("connection to {peer} closed")]
    Disconnected { peer: LocationId },
    #[error("{peer} is not known to this backend")]
    UnknownPeer { peer: LocationId },
    #[error("{0}")]
    Io(String),
}

/// A phonebook plus delivery: everything a projected program needs to talk
/// to its peers.
///
/// Implementations must deliver messages from one sender to one receiver in
/// the order they were sent, without loss or duplication, and must be
/// usable from every party's thread at once.
pub trait Backend: Sync {
    fn send(&self, from: &LocationId, to: &LocationId, payload: String) -> Result<(), TransportError>;

    /// Blocks until the next message from `from` to `at` arrives, or the
    /// backend's timeout elapses.
    fn recv(&self, at: &LocationId, from: &LocationId) -> Result<String, TransportError>;

    /// Tells peers blocked on `party` that it will send nothing more.
    fn abort(&self, _party: &LocationId) {}
}

impl<B: Backend + ?Sized> Backend for &B {
    fn send(&self, from: &LocationId, to: &LocationId, payload: String) -> Result<(), TransportError> {
        (**self).send(from, to, payload)
    }

    fn recv(&self, at: &LocationId, from: &LocationId) -> Result<String, TransportError> {
        (**self).recv(at, from)
    }

    fn abort(&self, party: &LocationId) {
        (**self).abort(party)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot decode {input:?}: {reason}")]
pub struct CodecError {
    pub input: String,
    pub reason: String,
}

/// Canonical text form of a value (JSON).
pub fn encode<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("codec types serialize infallibly")
}

pub fn decode<T: DeserializeOwned>(text: &str) -> Result<T, CodecError> {
    serde_json::from_str(text).map_err(|e| CodecError {
        input: text.to_string(),
        reason: e.to_string(),
    })
}
