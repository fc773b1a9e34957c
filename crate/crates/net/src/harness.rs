//! Running every party of a projected choreography on its own thread.

use std::net::TcpListener;
use std::time::Duration;

use census_core::{epp, run_network, Backend, Choreo, ChoreoError, LocationId, LocationList, PartyTrace};

use crate::config::NetworkConfig;
use crate::memory::MemoryBackend;
use crate::tcp::{StartError, TcpBackend};

/// What one party's thread ended with.
#[derive(Debug)]
pub struct PartyOutcome<L, T> {
    pub party: LocationId,
    /// `Ok(None)` for a party outside the census.
    pub result: Result<Option<T>, ChoreoError>,
    pub local: L,
    pub trace: PartyTrace,
}

/// Projects `chor` for each party and runs the programs concurrently, each
/// over its own backend handle. Outcomes come back in input order.
pub fn run_parties<L, T, B, F>(census: &LocationList, parties: Vec<(LocationId, L, B)>, chor: &F) -> Vec<PartyOutcome<L, T>>
where
    L: Send,
    T: Send,
    B: Backend + Send,
    F: Fn(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + Sync,
{
    std::thread::scope(|s| {
        let handles: Vec<_> = parties
            .into_iter()
            .map(|(party, mut local, backend)| {
                s.spawn(move || {
                    let program = epp(census, move |ch: &mut Choreo<'_, L>| chor(ch), &party);
                    let run = run_network(&backend, &party, &mut local, program);
                    PartyOutcome {
                        party,
                        result: run.result,
                        local,
                        trace: run.trace,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

/// All parties over one [`MemoryBackend`].
pub fn run_in_memory<L, T, F>(
    census: &LocationList,
    locals: Vec<(LocationId, L)>,
    timeout: Duration,
    chor: &F,
) -> Vec<PartyOutcome<L, T>>
where
    L: Send,
    T: Send,
    F: Fn(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + Sync,
{
    let mut names: Vec<LocationId> = census.as_slice().to_vec();
    for (p, _) in &locals {
        if !names.contains(p) {
            names.push(p.clone());
        }
    }
    let backend = MemoryBackend::with_timeout(
        LocationList::from_ids(names).expect("party names are distinct"),
        timeout,
    );
    let parties = locals.into_iter().map(|(p, l)| (p, l, &backend)).collect();
    run_parties(census, parties, chor)
}

/// All parties over TCP on loopback, each listening on an ephemeral port.
pub fn run_tcp_loopback<L, T, F>(
    census: &LocationList,
    locals: Vec<(LocationId, L)>,
    timeout: Duration,
    chor: &F,
) -> Result<Vec<PartyOutcome<L, T>>, StartError>
where
    L: Send,
    T: Send,
    F: Fn(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + Sync,
{
    let mut listeners = Vec::new();
    let mut config = NetworkConfig {
        timeout,
        ..NetworkConfig::default()
    };
    for (p, _) in &locals {
        let listener = TcpListener::bind("127.0.0.1:0").map_err(|source| StartError::Bind {
            addr: "127.0.0.1:0".into(),
            source,
        })?;
        let addr = listener.local_addr().map_err(|source| StartError::Bind {
            addr: "127.0.0.1:0".into(),
            source,
        })?;
        config.peers.insert(p.clone(), addr.to_string());
        listeners.push(listener);
    }
    run_tcp_with(census, locals, listeners, config, chor)
}

/// All parties over TCP in one process, at the addresses in `config`.
pub fn run_tcp_configured<L, T, F>(
    census: &LocationList,
    locals: Vec<(LocationId, L)>,
    config: NetworkConfig,
    chor: &F,
) -> Result<Vec<PartyOutcome<L, T>>, StartError>
where
    L: Send,
    T: Send,
    F: Fn(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + Sync,
{
    config.require(census)?;
    let mut listeners = Vec::new();
    for (p, _) in &locals {
        let addr = config.address(p)?.to_string();
        let listener = TcpListener::bind(&addr).map_err(|source| StartError::Bind { addr, source })?;
        listeners.push(listener);
    }
    run_tcp_with(census, locals, listeners, config, chor)
}

fn run_tcp_with<L, T, F>(
    census: &LocationList,
    locals: Vec<(LocationId, L)>,
    listeners: Vec<TcpListener>,
    config: NetworkConfig,
    chor: &F,
) -> Result<Vec<PartyOutcome<L, T>>, StartError>
where
    L: Send,
    T: Send,
    F: Fn(&mut Choreo<'_, L>) -> Result<T, ChoreoError> + Sync,
{
    let backends = locals
        .iter()
        .zip(listeners)
        .map(|((p, _), l)| TcpBackend::from_listener(p.clone(), l, config.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let parties = locals
        .into_iter()
        .zip(&backends)
        .map(|((p, l), b)| (p, l, b))
        .collect();
    Ok(run_parties(census, parties, chor))
}
