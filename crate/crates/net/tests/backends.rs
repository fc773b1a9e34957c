//! Delivery guarantees of the in-memory and TCP backends under load.

use std::net::TcpListener;
use std::thread;
use std::time::{Duration, Instant};

use census_core::{Backend, LocationId, LocationList, TransportError};
use census_net::{run_tcp_configured, MemoryBackend, NetworkConfig, TcpBackend};
use proptest::prelude::*;

fn id(name: &str) -> LocationId {
    LocationId::new(name).unwrap()
}

fn parties(n: usize) -> Vec<LocationId> {
    (0..n).map(|i| id(&format!("p{i}"))).collect()
}

/// Every ordered pair exchanges `count` numbered messages, with senders and
/// receivers all running at once.
fn exchange(backend: &impl Backend, ps: &[LocationId], count: usize) {
    thread::scope(|s| {
        for from in ps {
            s.spawn(move || {
                for i in 0..count {
                    for to in ps.iter().filter(|t| *t != from) {
                        backend.send(from, to, format!("{from}:{i}")).unwrap();
                    }
                }
            });
        }
        for at in ps {
            s.spawn(move || {
                let mut next = vec![0usize; ps.len()];
                // read round-robin across senders so queues interleave
                for _ in 0..count {
                    for (j, from) in ps.iter().enumerate().filter(|(_, f)| *f != at) {
                        let msg = backend.recv(at, from).unwrap();
                        assert_eq!(msg, format!("{from}:{}", next[j]), "at {at}");
                        next[j] += 1;
                    }
                }
            });
        }
    });
}

#[test]
fn memory_keeps_per_pair_fifo_under_concurrency() {
    let ps = parties(5);
    let backend = MemoryBackend::new(LocationList::from_ids(ps.clone()).unwrap());
    exchange(&backend, &ps, 500);
    assert_eq!(backend.pending(), 0);
}

fn loopback(ps: &[LocationId], timeout: Duration) -> Vec<TcpBackend> {
    let mut config = NetworkConfig {
        timeout,
        ..NetworkConfig::default()
    };
    let listeners: Vec<TcpListener> = ps.iter().map(|_| TcpListener::bind("127.0.0.1:0").unwrap()).collect();
    for (p, l) in ps.iter().zip(&listeners) {
        config.peers.insert(p.clone(), l.local_addr().unwrap().to_string());
    }
    ps.iter()
        .zip(listeners)
        .map(|(p, l)| TcpBackend::from_listener(p.clone(), l, config.clone()).unwrap())
        .collect()
}

/// Routes each party's calls to its own TCP backend.
struct Mesh(Vec<TcpBackend>);

impl Backend for Mesh {
    fn send(&self, from: &LocationId, to: &LocationId, payload: String) -> Result<(), TransportError> {
        self.0.iter().find(|b| b.me() == from).unwrap().send(from, to, payload)
    }

    fn recv(&self, at: &LocationId, from: &LocationId) -> Result<String, TransportError> {
        self.0.iter().find(|b| b.me() == at).unwrap().recv(at, from)
    }
}

#[test]
fn tcp_delivers_a_thousand_messages_without_loss_or_duplication() {
    let ps = parties(2);
    let mesh = Mesh(loopback(&ps, Duration::from_secs(10)));
    exchange(&mesh, &ps, 1000);
    // nothing extra is queued
    let err = {
        let quick = loopback(&ps, Duration::from_millis(100));
        quick[0].recv(&ps[0], &ps[1]).unwrap_err()
    };
    assert!(matches!(err, TransportError::Timeout { .. }));
}

#[test]
fn tcp_fifo_with_several_peers() {
    let ps = parties(4);
    let mesh = Mesh(loopback(&ps, Duration::from_secs(10)));
    exchange(&mesh, &ps, 200);
}

#[test]
fn tcp_abort_unblocks_a_waiting_peer() {
    let ps = parties(2);
    let bs = loopback(&ps, Duration::from_secs(20));
    let start = Instant::now();
    thread::scope(|s| {
        let waiter = s.spawn(|| bs[1].recv(&ps[1], &ps[0]));
        thread::sleep(Duration::from_millis(100));
        bs[0].abort(&ps[0]);
        let err = waiter.join().unwrap().unwrap_err();
        assert_eq!(err, TransportError::Disconnected { peer: ps[0].clone() });
    });
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn tcp_sends_only_as_its_own_party() {
    let ps = parties(2);
    let bs = loopback(&ps, Duration::from_secs(1));
    assert!(matches!(bs[0].send(&ps[1], &ps[0], "x".into()), Err(TransportError::Io(_))));
    assert_eq!(
        bs[0].send(&ps[0], &id("ghost"), "x".into()),
        Err(TransportError::UnknownPeer { peer: id("ghost") })
    );
}

#[test]
fn missing_peer_address_is_named() {
    let census = LocationList::new(["alice", "bob"]).unwrap();
    let config = NetworkConfig::parse("alice = 127.0.0.1:0").unwrap();
    let locals = vec![(id("alice"), ()), (id("bob"), ())];
    let err = run_tcp_configured(&census, locals, config, &|_: &mut census_core::Choreo<'_, ()>| Ok(()))
        .err()
        .unwrap();
    assert!(err.to_string().contains("bob"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any interleaving of sends across pairs is read back per pair in send
    /// order.
    #[test]
    fn memory_fifo_for_any_schedule(schedule in prop::collection::vec((0usize..3, 0usize..3), 0..60)) {
        let ps = parties(3);
        let backend = MemoryBackend::new(LocationList::from_ids(ps.clone()).unwrap());
        let mut sent: Vec<Vec<Vec<String>>> = vec![vec![Vec::new(); 3]; 3];
        for (k, (f, t)) in schedule.iter().enumerate() {
            let msg = format!("{k}");
            backend.send(&ps[*f], &ps[*t], msg.clone()).unwrap();
            sent[*f][*t].push(msg);
        }
        for (f, row) in sent.iter().enumerate() {
            for (t, msgs) in row.iter().enumerate() {
                for m in msgs {
                    prop_assert_eq!(&backend.recv(&ps[t], &ps[f]).unwrap(), m);
                }
            }
        }
        prop_assert_eq!(backend.pending(), 0);
    }
}
