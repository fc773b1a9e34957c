//! A key-value store whose replication scheme is a parameter, with an
//! N-ary primary/backup strategy.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::cli::{input, Cli, ParseInput};
use crate::choreo::{Choreo, ChoreoResult};
use crate::located::{Faceted, Wrapped};
use crate::locations::{cons, refl, singleton, LocationId, Member, Subset};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Request {
    Put(String, String),
    Get(String),
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Response {
    Found(String),
    NotFound,
    Stopped,
    /// The servers disagreed; one entry per distinct answer.
    Desynchronization(Vec<Response>),
}

pub type StoreState = BTreeMap<String, String>;

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Request::Put(k, v) => write!(f, "Put {k:?} {v:?}"),
            Request::Get(k) => write!(f, "Get {k:?}"),
            Request::Stop => f.write_str("Stop"),
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Found(v) => write!(f, "Found {v:?}"),
            Response::NotFound => f.write_str("NotFound"),
            Response::Stopped => f.write_str("Stopped"),
            Response::Desynchronization(rs) => {
                f.write_str("Desynchronization [")?;
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Splits on whitespace; a double-quoted word may contain spaces and JSON
/// string escapes.
fn words(line: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = line.trim_start();
    while !rest.is_empty() {
        if rest.starts_with('"') {
            let bytes = rest.as_bytes();
            let mut i = 1;
            while i < bytes.len() && bytes[i] != b'"' {
                i += if bytes[i] == b'\\' { 2 } else { 1 };
            }
            if i >= bytes.len() {
                return None;
            }
            out.push(serde_json::from_str(&rest[..=i]).ok()?);
            rest = &rest[i + 1..];
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            out.push(rest[..end].to_string());
            rest = &rest[end..];
        }
        rest = rest.trim_start();
    }
    Some(out)
}

impl ParseInput for Request {
    /// Accepts `put KEY VALUE`, `get KEY` and `stop`, in any letter case.
    fn parse_input(line: &str) -> Option<Self> {
        let w = words(line)?;
        let (cmd, args) = w.split_first()?;
        match (cmd.to_ascii_lowercase().as_str(), args) {
            ("put", [k, v]) => Some(Request::Put(k.clone(), v.clone())),
            ("get", [k]) => Some(Request::Get(k.clone())),
            ("stop", []) => Some(Request::Stop),
            _ => None,
        }
    }
}

pub fn mlookup(key: &str, state: &StoreState) -> Response {
    state
        .get(key)
        .map_or(Response::NotFound, |v| Response::Found(v.clone()))
}

/// Applies a request. A put answers with the binding it replaced.
pub fn handle_request(state: &mut StoreState, request: &Request) -> Response {
    match request {
        Request::Put(k, v) => {
            let old = mlookup(k, state);
            state.insert(k.clone(), v.clone());
            old
        }
        Request::Get(k) => mlookup(k, state),
        Request::Stop => Response::Stopped,
    }
}

/// How a store is laid out over the census. `handle` must leave the
/// response known to the whole census, since every party decides from it
/// whether the session goes on.
pub trait ReplicationStrategy<L> {
    type Rigging;

    fn primary(&self) -> &Member;

    fn setup(&self, ch: &mut Choreo<'_, L>) -> ChoreoResult<Self::Rigging>;

    /// `primary_has` proves the primary is among `request`'s owners.
    fn handle(
        &self,
        ch: &mut Choreo<'_, L>,
        rigging: &mut Self::Rigging,
        primary_has: &Member,
        request: &dyn Wrapped<Request>,
    ) -> ChoreoResult<Response>;
}

/// A deliberately wrong starting state at one backup, for exercising
/// desynchronization reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub backup: LocationId,
    pub key: String,
    pub value: String,
}

/// The primary forwards each request to every backup, all servers apply
/// it, and the primary compares their answers.
#[derive(Debug, Clone)]
pub struct NaryReplication {
    primary: Member,
    backups: Subset,
    corrupt: Option<Corruption>,
}

impl NaryReplication {
    pub fn new(primary: Member, backups: Subset) -> Self {
        NaryReplication {
            primary,
            backups,
            corrupt: None,
        }
    }

    pub fn with_corruption(mut self, corruption: Corruption) -> Self {
        self.corrupt = Some(corruption);
        self
    }

    pub fn servers(&self) -> Result<Subset, crate::locations::WitnessError> {
        cons(&self.primary, &self.backups)
    }
}

impl<L> ReplicationStrategy<L> for NaryReplication {
    type Rigging = Faceted<StoreState>;

    fn primary(&self) -> &Member {
        &self.primary
    }

    fn setup(&self, ch: &mut Choreo<'_, L>) -> ChoreoResult<Faceted<StoreState>> {
        let servers = self.servers()?;
        ch.parallel(&servers, |server, _, _| {
            let mut state = StoreState::new();
            if let Some(c) = &self.corrupt {
                if c.backup == *server.subject() {
                    state.insert(c.key.clone(), c.value.clone());
                }
            }
            Ok(state)
        })
    }

    fn handle(
        &self,
        ch: &mut Choreo<'_, L>,
        rigging: &mut Faceted<StoreState>,
        primary_has: &Member,
        request: &dyn Wrapped<Request>,
    ) -> ChoreoResult<Response> {
        let servers = self.servers()?;
        let request = ch.comm(&self.primary, (primary_has, request), &servers)?;
        let local = ch.parallel(&servers, |server, un, _| {
            Ok(handle_request(un.get_mut(server, rigging), un.get(server, &request)))
        })?;
        let at_primary = self.primary.alone();
        let responses = ch.fan_in(&servers, &at_primary, |ch, server| {
            ch.send_to((server, &servers, &local), &at_primary)
        })?;
        let response = ch.congruently(&at_primary, |un| {
            let mut distinct: Vec<Response> = Vec::new();
            for r in un.get(&refl(at_primary.subject()), &responses) {
                if !distinct.contains(r) {
                    distinct.push(r.clone());
                }
            }
            if distinct.len() == 1 {
                distinct.remove(0)
            } else {
                Response::Desynchronization(distinct)
            }
        })?;
        ch.broadcast((&self.primary, &response))
    }
}

/// The client's session: read a command, let the strategy answer it, print
/// the answer, until the client asks to stop.
pub fn kvs<L: Cli, R: ReplicationStrategy<L>>(ch: &mut Choreo<'_, L>, strategy: &R, client: &Member) -> ChoreoResult<()> {
    let mut rigging = strategy.setup(ch)?;
    let primary = strategy.primary().clone();
    let primary_has = singleton(primary.subject());
    loop {
        let request = ch.run_then_send(client, |io| input::<Request>(io, "Command?"), &primary.alone())?;
        let response = strategy.handle(ch, &mut rigging, &primary_has, &request)?;
        if response == Response::Stopped {
            return Ok(());
        }
        ch.locally_plain_unit(client, |io| {
            io.put_output("Received:", &response.to_string());
            Ok(())
        })?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parses_commands() {
        assert_eq!(Request::parse_input("put k v"), Some(Request::Put("k".into(), "v".into())));
        assert_eq!(
            Request::parse_input(r#"Put "a key" "say \"hi\"""#),
            Some(Request::Put("a key".into(), "say \"hi\"".into()))
        );
        assert_eq!(Request::parse_input("GET k"), Some(Request::Get("k".into())));
        assert_eq!(Request::parse_input(" stop "), Some(Request::Stop));
        assert_eq!(Request::parse_input("get"), None);
        assert_eq!(Request::parse_input("put \"open"), None);
        assert_eq!(Request::parse_input(""), None);
    }

    #[test]
    fn display_round_trips_through_parser() {
        for r in [
            Request::Put("k y".into(), "v\"".into()),
            Request::Get("k".into()),
            Request::Stop,
        ] {
            assert_eq!(Request::parse_input(&r.to_string()), Some(r));
        }
        let d = Response::Desynchronization(vec![Response::Found("a".into()), Response::NotFound]);
        assert_eq!(d.to_string(), r#"Desynchronization [Found "a",NotFound]"#);
    }

    #[test]
    fn put_returns_previous_binding() {
        let mut s = StoreState::new();
        assert_eq!(handle_request(&mut s, &Request::Get("k".into())), Response::NotFound);
        assert_eq!(handle_request(&mut s, &Request::Put("k".into(), "1".into())), Response::NotFound);
        assert_eq!(
            handle_request(&mut s, &Request::Put("k".into(), "2".into())),
            Response::Found("1".into())
        );
        assert_eq!(handle_request(&mut s, &Request::Get("k".into())), Response::Found("2".into()));
        assert_eq!(handle_request(&mut s, &Request::Stop), Response::Stopped);
    }
}
