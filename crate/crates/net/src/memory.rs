//! All parties in one process, talking through shared queues.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use census_core::{Backend, LocationId, LocationList, TransportError};

/// One FIFO queue per ordered pair of parties.
pub struct MemoryBackend {
    parties: LocationList,
    timeout: Duration,
    state: Mutex<State>,
    arrived: Condvar,
}

#[derive(Default)]
struct State {
    queues: HashMap<(LocationId, LocationId), VecDeque<String>>,
    aborted: HashSet<LocationId>,
}

impl MemoryBackend {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    pub fn new(parties: LocationList) -> Self {
        Self::with_timeout(parties, Self::DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(parties: LocationList, timeout: Duration) -> Self {
        MemoryBackend {
            parties,
            timeout,
            state: Mutex::new(State::default()),
            arrived: Condvar::new(),
        }
    }

    fn known(&self, who: &LocationId) -> Result<(), TransportError> {
        if self.parties.contains(who.as_str()) {
            Ok(())
        } else {
            Err(TransportError::UnknownPeer { peer: who.clone() })
        }
    }

    /// Messages sent but not yet received, over all pairs.
    pub fn pending(&self) -> usize {
        let state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        state.queues.values().map(VecDeque::len).sum()
    }
}

impl Backend for MemoryBackend {
    fn send(&self, from: &LocationId, to: &LocationId, payload: String) -> Result<(), TransportError> {
        self.known(from)?;
        self.known(to)?;
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        state
            .queues
            .entry((from.clone(), to.clone()))
            .or_default()
            .push_back(payload);
        drop(state);
        self.arrived.notify_all();
        Ok(())
    }

    fn recv(&self, at: &LocationId, from: &LocationId) -> Result<String, TransportError> {
        self.known(at)?;
        self.known(from)?;
        let deadline = Instant::now() + self.timeout;
        let key = (from.clone(), at.clone());
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            if let Some(msg) = state.queues.get_mut(&key).and_then(VecDeque::pop_front) {
                return Ok(msg);
            }
            if state.aborted.contains(from) {
                return Err(TransportError::PeerAborted { peer: from.clone() });
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(TransportError::Timeout { from: from.clone() });
            }
            state = self
                .arrived
                .wait_timeout(state, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }

    fn abort(&self, party: &LocationId) {
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        state.aborted.insert(party.clone());
        drop(state);
        self.arrived.notify_all();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> LocationId {
        LocationId::new(s).unwrap()
    }

    fn backend(timeout_ms: u64) -> MemoryBackend {
        MemoryBackend::with_timeout(
            LocationList::new(["a", "b", "c"]).unwrap(),
            Duration::from_millis(timeout_ms),
        )
    }

    #[test]
    fn fifo_per_pair() {
        let b = backend(1000);
        b.send(&id("a"), &id("b"), "x".into()).unwrap();
        b.send(&id("c"), &id("b"), "z".into()).unwrap();
        b.send(&id("a"), &id("b"), "y".into()).unwrap();
        assert_eq!(b.recv(&id("b"), &id("a")).unwrap(), "x");
        assert_eq!(b.recv(&id("b"), &id("a")).unwrap(), "y");
        assert_eq!(b.recv(&id("b"), &id("c")).unwrap(), "z");
        assert_eq!(b.pending(), 0);
    }

    #[test]
    fn empty_queue_times_out() {
        let b = backend(20);
        assert_eq!(b.recv(&id("a"), &id("b")), Err(TransportError::Timeout { from: id("b") }));
    }

    #[test]
    fn abort_wakes_waiters_but_queued_messages_still_arrive() {
        let b = backend(10_000);
        b.send(&id("a"), &id("b"), "last".into()).unwrap();
        std::thread::scope(|s| {
            let waiter = s.spawn(|| {
                let first = b.recv(&id("b"), &id("a"));
                let second = b.recv(&id("b"), &id("a"));
                (first, second)
            });
            std::thread::sleep(Duration::from_millis(20));
            b.abort(&id("a"));
            let (first, second) = waiter.join().unwrap();
            assert_eq!(first.unwrap(), "last");
            assert_eq!(second, Err(TransportError::PeerAborted { peer: id("a") }));
        });
    }

    #[test]
    fn strangers_are_rejected() {
        let b = backend(10);
        assert!(matches!(
            b.send(&id("a"), &id("zed"), String::new()),
            Err(TransportError::UnknownPeer { .. })
        ));
    }
}
