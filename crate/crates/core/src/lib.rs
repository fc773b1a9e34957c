//! Choreographic programming with an explicit census.
//!
//! A choreography is one program describing what every party of a
//! distributed protocol does. Its census is the list of parties taking
//! part, and choreographies can be written for censuses of any size and
//! membership. Values are [`Located`] (one value known to a set of owners)
//! or [`Faceted`] (one facet per owner); branching requires the guard to be
//! known to the whole census, which keeps every party's view of control flow
//! consistent without hidden broadcasts.
//!
//! The same choreography runs two ways:
//!
//! * [`run_choreo`] executes everyone's effects in one place;
//! * [`epp`] projects it to one party's [`NetworkProgram`], which
//!   [`run_network`] executes over any [`Backend`].
//!
//! The [`protocols`] module holds the worked examples: a card game, an
//! N-ary replicated key-value store, boolean secret sharing, oblivious
//! transfer, GMW, and a federated lottery.
//!
//! This crate is `no_std` and needs only `alloc`. Backends that touch
//! threads or sockets live in the `census-net` crate.

#![no_std]

extern crate alloc;

pub mod choreo;
pub mod error;
pub mod interp;
pub mod located;
pub mod locations;
pub mod protocols;
pub mod transport;

pub use choreo::{Choreo, ChoreoResult, Message};
pub use error::{ChoreoError, LocalError};
pub use interp::{
    epp, recv, run, run_choreo, run_network, send, Central, Effect, EffectRecord, Endpoint, Network,
    NetworkProgram, NetworkRun, PartyTrace, TraceEvent,
};
pub use located::{flatten, fracture, localize, Faceted, Located, Unwrap, Unwraps, Wrapped};
pub use locations::{LocationId, LocationList, Member, Subset, WitnessError};
pub use transport::{decode, encode, Backend, CodecError, TransportError};
