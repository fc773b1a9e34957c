//! The two semantics of a choreography: the centralized reference
//! interpreter, and endpoint projection to per-party network programs.
//!
//! A choreography is a function over a [`Choreo`] handle. Every primitive
//! the function invokes is reported to an engine as a concrete
//! [`EffectRecord`]; the continuation is the rest of the function. The
//! centralized engine performs every party's share of each effect in one
//! place. The projected engine performs only the target's share and turns
//! communication into [`Network`] sends and receives.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::choreo::Choreo;
use crate::error::{ChoreoError, LocalError};
use crate::locations::{LocationId, LocationList};
use crate::transport::{decode, encode, Backend};

/// The seven effect kinds, with the locations each one names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Parallel { parties: LocationList },
    Congruently { parties: LocationList },
    Comm { sender: LocationId, recipients: LocationList },
    Enclave { census: LocationList },
    Naked { owners: LocationList },
    FanOut { parties: LocationList },
    FanIn { parties: LocationList, recipients: LocationList },
}

impl Effect {
    /// Every location the node refers to.
    pub fn locations(&self) -> Vec<&LocationId> {
        match self {
            Effect::Parallel { parties }
            | Effect::Congruently { parties }
            | Effect::FanOut { parties } => parties.iter().collect(),
            Effect::Comm { sender, recipients } => {
                core::iter::once(sender).chain(recipients.iter()).collect()
            }
            Effect::Enclave { census } => census.iter().collect(),
            Effect::Naked { .. } => Vec::new(),
            Effect::FanIn { parties, recipients } => parties.iter().chain(recipients.iter()).collect(),
        }
    }
}

/// An effect node together with the census it was issued in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectRecord {
    pub census: LocationList,
    pub effect: Effect,
}

/// State of the centralized interpreter: every party's local-effect state,
/// plus an optional log of the effect nodes visited.
pub struct Central<L> {
    locals: BTreeMap<LocationId, L>,
    log: Option<Vec<EffectRecord>>,
    steps: usize,
}

impl<L> Central<L> {
    pub fn new(locals: impl IntoIterator<Item = (LocationId, L)>) -> Self {
        Central {
            locals: locals.into_iter().collect(),
            log: None,
            steps: 0,
        }
    }

    /// One local state per census member, built by `make`.
    pub fn for_census(census: &LocationList, mut make: impl FnMut(&LocationId) -> L) -> Self {
        Self::new(census.iter().map(|p| (p.clone(), make(p))))
    }

    /// Keeps a log of every effect node the run visits.
    pub fn with_effect_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn effect_log(&self) -> &[EffectRecord] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn local(&self, party: &str) -> Option<&L> {
        self.locals.get(party)
    }

    pub fn into_locals(self) -> BTreeMap<LocationId, L> {
        self.locals
    }
}

pub(crate) enum Engine<'r, L> {
    Central(&'r mut Central<L>),
    Projected {
        target: LocationId,
        net: &'r mut (dyn Network<L> + 'r),
    },
}

impl<'r, L> Engine<'r, L> {
    pub(crate) fn reborrow(&mut self) -> Engine<'_, L> {
        match self {
            Engine::Central(c) => Engine::Central(c),
            Engine::Projected { target, net } => Engine::Projected {
                target: target.clone(),
                net: &mut **net,
            },
        }
    }

    pub(crate) fn record(&mut self, census: &LocationList, effect: Effect) {
        let record = EffectRecord {
            census: census.clone(),
            effect,
        };
        match self {
            Engine::Central(c) => {
                c.steps += 1;
                if let Some(log) = c.log.as_mut() {
                    log.push(record);
                }
            }
            Engine::Projected { net, .. } => net.record(record),
        }
    }

    /// Whether this engine performs `party`'s share of an effect.
    pub(crate) fn acts_for(&self, party: &LocationId) -> bool {
        match self {
            Engine::Central(_) => true,
            Engine::Projected { target, .. } => target == party,
        }
    }

    /// Whether this engine performs the share of any of `parties`.
    pub(crate) fn involves(&self, parties: &LocationList) -> bool {
        match self {
            Engine::Central(_) => true,
            Engine::Projected { target, .. } => parties.contains(target.as_str()),
        }
    }

    pub(crate) fn step(&self) -> usize {
        match self {
            Engine::Central(c) => c.steps,
            Engine::Projected { net, .. } => net.position(),
        }
    }

    pub(crate) fn local(&mut self, party: &LocationId) -> &mut L {
        match self {
            Engine::Central(c) => c
                .locals
                .get_mut(party.as_str())
                .unwrap_or_else(|| panic!("no local state registered for {party}")),
            Engine::Projected { target, net } => {
                assert!(target == party, "{target} asked to run {party}'s local code");
                net.run()
            }
        }
    }

    pub(crate) fn local_error(&self, party: &LocationId, error: LocalError) -> ChoreoError {
        ChoreoError::Local {
            party: party.clone(),
            step: self.step(),
            error,
        }
    }
}

/// Runs a choreography in one process, performing every party's effects.
pub fn run_choreo<L, T, F>(census: &LocationList, central: &mut Central<L>, chor: F) -> Result<T, ChoreoError>
where
    F: FnOnce(&mut Choreo<'_, L>) -> Result<T, ChoreoError>,
{
    let mut ch = Choreo::new(census.clone(), Engine::Central(central));
    chor(&mut ch)
}

/// The per-party side of the network: run local code, send, receive.
pub trait Network<L> {
    fn me(&self) -> &LocationId;

    /// Access to the local-effect state, for one `Run` step.
    fn run(&mut self) -> &mut L;

    /// Sends one payload to each of `to`, in order.
    fn send(&mut self, payload: String, to: &[LocationId]) -> Result<(), ChoreoError>;

    fn recv(&mut self, from: &LocationId) -> Result<String, ChoreoError>;

    /// Number of network-level events so far; locates errors.
    fn position(&self) -> usize;

    /// Notes the choreographic effect the next network events belong to.
    fn record(&mut self, _effect: EffectRecord) {}
}

/// Sends `value` to each of `to`.
pub fn send<L, T: Serialize + ?Sized>(
    net: &mut (dyn Network<L> + '_),
    value: &T,
    to: &[LocationId],
) -> Result<(), ChoreoError> {
    net.send(encode(value), to)
}

/// Receives the next value from `from`.
pub fn recv<L, T: DeserializeOwned>(net: &mut (dyn Network<L> + '_), from: &LocationId) -> Result<T, ChoreoError> {
    let text = net.recv(from)?;
    decode(&text).map_err(|error| ChoreoError::Decode {
        party: net.me().clone(),
        from: from.clone(),
        step: net.position(),
        error,
    })
}

/// Runs local code.
pub fn run<L, T>(net: &mut (dyn Network<L> + '_), f: impl FnOnce(&mut L) -> T) -> T {
    f(net.run())
}

/// A party-local program over `Run`, `Send`, and `Recv`.
pub type NetworkProgram<'a, L, T> =
    Box<dyn for<'n> FnOnce(&'n mut (dyn Network<L> + 'n)) -> Result<T, ChoreoError> + 'a>;

/// Projects a choreography to `target`'s network program.
///
/// The program yields `None` exactly when `target` is outside the census;
/// in that case it performs no effects.
pub fn epp<'a, L, T, F>(census: &LocationList, chor: F, target: &LocationId) -> NetworkProgram<'a, L, Option<T>>
where
    L: 'a,
    T: 'a,
    F: FnOnce(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + 'a,
{
    let census = census.clone();
    let target = target.clone();
    Box::new(move |net| {
        if !census.contains(target.as_str()) {
            return Ok(None);
        }
        let mut ch = Choreo::new(census, Engine::Projected { target, net });
        chor(&mut ch).map(Some)
    })
}

/// One entry of a party's trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// A choreographic effect node reached by this party.
    Effect(EffectRecord),
    /// Local code ran.
    Run,
    /// One payload unicast to each of `to`.
    Send { to: Vec<LocationId>, payload: String },
    Recv { from: LocationId, payload: String },
}

/// What one party did during a projected run, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyTrace {
    pub party: LocationId,
    pub events: Vec<TraceEvent>,
}

impl PartyTrace {
    pub fn new(party: LocationId) -> Self {
        PartyTrace {
            party,
            events: Vec::new(),
        }
    }

    /// Unicast messages this party put on the network.
    pub fn messages_sent(&self) -> usize {
        self.events
            .iter()
            .map(|e| match e {
                TraceEvent::Send { to, .. } => to.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn messages_received(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Recv { .. }))
            .count()
    }

    /// `(receiver, payload)` for every unicast message, in send order.
    pub fn sent_to(&self) -> impl Iterator<Item = (&LocationId, &str)> {
        self.events.iter().flat_map(|e| match e {
            TraceEvent::Send { to, payload } => to.iter().map(|t| (t, payload.as_str())).collect(),
            _ => Vec::new(),
        })
    }

    /// `(sender, payload)` for every message received, in order.
    pub fn received_from(&self) -> impl Iterator<Item = (&LocationId, &str)> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Recv { from, payload } => Some((from, payload.as_str())),
            _ => None,
        })
    }

    pub fn effects(&self) -> impl Iterator<Item = &EffectRecord> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Effect(r) => Some(r),
            _ => None,
        })
    }
}

/// A [`Network`] backed by a [`Backend`], recording a [`PartyTrace`].
pub struct Endpoint<'a, L> {
    backend: &'a dyn Backend,
    local: &'a mut L,
    trace: PartyTrace,
}

impl<'a, L> Endpoint<'a, L> {
    pub fn new(backend: &'a dyn Backend, me: LocationId, local: &'a mut L) -> Self {
        Endpoint {
            backend,
            local,
            trace: PartyTrace::new(me),
        }
    }

    pub fn into_trace(self) -> PartyTrace {
        self.trace
    }

    fn transport_error(&self, error: crate::transport::TransportError) -> ChoreoError {
        ChoreoError::Transport {
            party: self.trace.party.clone(),
            step: self.trace.events.len(),
            error,
        }
    }
}

impl<L> Network<L> for Endpoint<'_, L> {
    fn me(&self) -> &LocationId {
        &self.trace.party
    }

    fn run(&mut self) -> &mut L {
        self.trace.events.push(TraceEvent::Run);
        self.local
    }

    fn send(&mut self, payload: String, to: &[LocationId]) -> Result<(), ChoreoError> {
        for peer in to {
            if let Err(e) = self.backend.send(&self.trace.party, peer, payload.clone()) {
                return Err(self.transport_error(e));
            }
        }
        self.trace.events.push(TraceEvent::Send {
            to: to.to_vec(),
            payload,
        });
        Ok(())
    }

    fn recv(&mut self, from: &LocationId) -> Result<String, ChoreoError> {
        match self.backend.recv(&self.trace.party, from) {
            Ok(payload) => {
                self.trace.events.push(TraceEvent::Recv {
                    from: from.clone(),
                    payload: payload.clone(),
                });
                Ok(payload)
            }
            Err(e) => Err(self.transport_error(e)),
        }
    }

    fn position(&self) -> usize {
        self.trace.events.len()
    }

    fn record(&mut self, effect: EffectRecord) {
        self.trace.events.push(TraceEvent::Effect(effect));
    }
}

/// Outcome of one party's network program.
#[derive(Debug)]
pub struct NetworkRun<T> {
    pub result: Result<T, ChoreoError>,
    pub trace: PartyTrace,
}

/// Executes `program` as party `me` over `backend`. On failure the backend
/// is told that `me` aborted.
pub fn run_network<L, T>(
    backend: &dyn Backend,
    me: &LocationId,
    local: &mut L,
    program: NetworkProgram<'_, L, T>,
) -> NetworkRun<T> {
    let mut endpoint = Endpoint::new(backend, me.clone(), local);
    let result = program(&mut endpoint);
    if result.is_err() {
        backend.abort(me);
    }
    NetworkRun {
        result,
        trace: endpoint.into_trace(),
    }
}
