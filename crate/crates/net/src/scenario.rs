//! The runnable examples: each protocol together with a census, its roles,
//! and the outputs it reports.

use std::collections::BTreeMap;
use std::fmt;

use census_core::locations::{explicit_member, explicit_subset, listed_first, listed_second};
use census_core::protocols::card_game::card_game;
use census_core::protocols::cli::{input, party_rng, Cli, Scripted};
use census_core::protocols::example_chor::example_chor;
use census_core::protocols::gmw::{f_and, gmw, Circuit};
use census_core::protocols::kvs::{kvs, Corruption, NaryReplication};
use census_core::protocols::lottery::{lottery, Fp, LotteryConfig};
use census_core::protocols::ot::{ot2, ToyRsa};
use census_core::protocols::sharing::{reveal, secret_share};
use census_core::{Choreo, ChoreoError, LocationId, LocationList, WitnessError};
use rand::Rng;

/// Names accepted by `--example`.
pub const EXAMPLES: &[&str] = &[
    "card-game",
    "example-chor",
    "kvs",
    "secret-share",
    "ot",
    "f-and",
    "gmw",
    "lottery",
];

#[derive(Debug, Clone)]
pub enum Scenario {
    /// The first census member deals.
    CardGame { census: LocationList },
    ExampleChor {
        census: LocationList,
        clique: LocationList,
        alice: LocationId,
        bob: LocationId,
        carroll: LocationId,
        value: i64,
    },
    Kvs {
        census: LocationList,
        client: LocationId,
        primary: LocationId,
        backups: LocationList,
        corruption: Option<Corruption>,
    },
    /// The first census member shares a bit; everyone reveals it.
    SecretShare { census: LocationList },
    /// The census is `[sender, receiver]`.
    Ot { census: LocationList },
    /// The first member inputs `u`, the last inputs `v`.
    FAnd { census: LocationList },
    Gmw { census: LocationList, circuit: Circuit },
    Lottery {
        census: LocationList,
        clients: LocationList,
        servers: LocationList,
        analyst: LocationId,
        config: LotteryConfig,
    },
}

pub fn show_bool(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

fn id(name: &str) -> Result<LocationId, String> {
    LocationId::new(name).map_err(|e| e.to_string())
}

fn list<S: AsRef<str>>(names: &[S]) -> Result<LocationList, String> {
    LocationList::new(names.iter().map(|n| n.as_ref().to_string())).map_err(|e| e.to_string())
}

/// Census parameters by role, e.g. `clients -> [c1, c2]`.
pub type Roles = BTreeMap<String, Vec<String>>;

fn role(roles: &Roles, key: &str, default: &[&'static str]) -> Vec<String> {
    roles
        .get(key)
        .cloned()
        .unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
}

fn single(roles: &Roles, key: &str, default: &'static str) -> Result<String, String> {
    let v = role(roles, key, &[default]);
    match v.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(format!("--{key} takes exactly one name")),
    }
}

/// Appends names not yet present, keeping first occurrences.
fn union(parts: &[&[String]]) -> Result<LocationList, String> {
    let mut out: Vec<String> = Vec::new();
    for part in parts {
        for n in *part {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
    list(&out)
}

impl Scenario {
    /// Builds an example from role parameters, with defaults for anything
    /// left out.
    pub fn from_roles(example: &str, roles: &Roles, circuit: Option<&str>, tamper: Option<&str>) -> Result<Self, String> {
        let known: &[&str] = match example {
            "card-game" => &["dealer", "players"],
            "example-chor" => &["alice", "bob", "carroll", "clique"],
            "kvs" => &["client", "primary", "backups"],
            "secret-share" | "f-and" | "gmw" => &["parties"],
            "ot" => &["sender", "receiver"],
            "lottery" => &["clients", "servers", "analyst"],
            other => return Err(format!("unknown example {other:?}; available: {}", EXAMPLES.join(", "))),
        };
        if let Some(extra) = roles.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(format!("{example} has no role {extra:?}; its roles are {}", known.join(", ")));
        }
        let scenario = match example {
            "card-game" => {
                let dealer = single(roles, "dealer", "dealer")?;
                let players = role(roles, "players", &["p1", "p2"]);
                if players.is_empty() {
                    return Err("card-game needs at least one player".into());
                }
                let mut names = vec![dealer];
                names.extend(players);
                Scenario::CardGame { census: list(&names)? }
            }
            "example-chor" => {
                let alice = single(roles, "alice", "alice")?;
                let bob = single(roles, "bob", "bob")?;
                let carroll = single(roles, "carroll", "carroll")?;
                let clique = role(roles, "clique", &[]);
                let clique = if clique.is_empty() {
                    vec![alice.clone(), bob.clone()]
                } else {
                    clique
                };
                let census = union(&[&clique, &[alice.clone(), bob.clone(), carroll.clone()]])?;
                Scenario::ExampleChor {
                    census,
                    clique: list(&clique)?,
                    alice: id(&alice)?,
                    bob: id(&bob)?,
                    carroll: id(&carroll)?,
                    value: 42,
                }
            }
            "kvs" => {
                let client = single(roles, "client", "client")?;
                let primary = single(roles, "primary", "primary")?;
                let backups = role(roles, "backups", &["b1", "b2"]);
                let census = union(&[&[client.clone(), primary.clone()], &backups])?;
                Scenario::Kvs {
                    census,
                    client: id(&client)?,
                    primary: id(&primary)?,
                    backups: list(&backups)?,
                    corruption: None,
                }
            }
            "secret-share" => Scenario::SecretShare {
                census: list(&role(roles, "parties", &["p1", "p2", "p3"]))?,
            },
            "ot" => {
                let s = single(roles, "sender", "sender")?;
                let r = single(roles, "receiver", "receiver")?;
                Scenario::Ot { census: list(&[s, r])? }
            }
            "f-and" => Scenario::FAnd {
                census: list(&role(roles, "parties", &["p1", "p2", "p3"]))?,
            },
            "gmw" => {
                let census = list(&role(roles, "parties", &["p1", "p2", "p3"]))?;
                let text = circuit.unwrap_or("and(in(p1), xor(in(p2), in(p3)))");
                let circuit = parse_circuit(text, &census)?;
                Scenario::Gmw { census, circuit }
            }
            "lottery" => {
                let clients = role(roles, "clients", &["c1", "c2", "c3"]);
                let servers = role(roles, "servers", &["s1", "s2", "s3"]);
                let analyst = single(roles, "analyst", "analyst")?;
                let census = union(&[&clients, &servers, std::slice::from_ref(&analyst)])?;
                let config = LotteryConfig {
                    tamper: tamper.map(id).transpose()?,
                    ..LotteryConfig::default()
                };
                Scenario::Lottery {
                    census,
                    clients: list(&clients)?,
                    servers: list(&servers)?,
                    analyst: id(&analyst)?,
                    config,
                }
            }
            _ => unreachable!(),
        };
        if tamper.is_some() && !matches!(scenario, Scenario::Lottery { .. }) {
            return Err("--tamper only applies to the lottery".into());
        }
        Ok(scenario)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CardGame { .. } => "card-game",
            Scenario::ExampleChor { .. } => "example-chor",
            Scenario::Kvs { .. } => "kvs",
            Scenario::SecretShare { .. } => "secret-share",
            Scenario::Ot { .. } => "ot",
            Scenario::FAnd { .. } => "f-and",
            Scenario::Gmw { .. } => "gmw",
            Scenario::Lottery { .. } => "lottery",
        }
    }

    pub fn census(&self) -> &LocationList {
        match self {
            Scenario::CardGame { census }
            | Scenario::ExampleChor { census, .. }
            | Scenario::Kvs { census, .. }
            | Scenario::SecretShare { census }
            | Scenario::Ot { census }
            | Scenario::FAnd { census }
            | Scenario::Gmw { census, .. }
            | Scenario::Lottery { census, .. } => census,
        }
    }

    /// The choreography, reporting results through `put_output`.
    pub fn run<L: Cli>(&self, ch: &mut Choreo<'_, L>) -> Result<(), ChoreoError> {
        let everyone = ch.all();
        match self {
            Scenario::CardGame { .. } => card_game(ch),
            Scenario::ExampleChor {
                clique,
                alice,
                bob,
                carroll,
                value,
                ..
            } => {
                let clique = explicit_subset(clique, ch.census())?;
                let carroll = ch.member(carroll.as_str())?;
                let got = example_chor(ch, &clique, alice, bob, &carroll, *value)?;
                let me = explicit_member(carroll.subject().as_str(), got.owners())?;
                ch.locally_unit(&carroll, |un, io| {
                    io.put_output("Result:", &un.get(&me, &got).to_string());
                    Ok(())
                })
            }
            Scenario::Kvs {
                client,
                primary,
                backups,
                corruption,
                ..
            } => {
                let client = ch.member(client.as_str())?;
                let primary = ch.member(primary.as_str())?;
                let backups = explicit_subset(backups, ch.census())?;
                let mut strategy = NaryReplication::new(primary, backups);
                if let Some(c) = corruption {
                    strategy = strategy.with_corruption(c.clone());
                }
                kvs(ch, &strategy, &client)
            }
            Scenario::SecretShare { .. } => {
                let dealer = listed_first(ch.census())?;
                let secret = ch.locally_plain(&dealer, |io| input::<bool>(io, "Enter a secret input value:"))?;
                let shares = secret_share(ch, &dealer, &secret)?;
                let x = reveal(ch, &shares)?;
                ch.parallel_plain(&everyone, |io| {
                    io.put_output("Revealed:", show_bool(x));
                    Ok(())
                })
                .map(drop)
            }
            Scenario::Ot { .. } => {
                let sender = listed_first(ch.census())?;
                let receiver = listed_second(ch.census())?;
                let bb = ch.locally_plain(&sender, |io| Ok((input::<bool>(io, "b1:")?, input::<bool>(io, "b2:")?)))?;
                let s = ch.locally_plain(&receiver, |io| input::<bool>(io, "select bit:"))?;
                let got = ot2(ch, &ToyRsa::default(), &bb, &s)?;
                let me = explicit_member(receiver.subject().as_str(), got.owners())?;
                ch.locally_unit(&receiver, |un, io| {
                    io.put_output("Received:", show_bool(*un.get(&me, &got)));
                    Ok(())
                })
            }
            Scenario::FAnd { census } => {
                let first = listed_first(ch.census())?;
                let last = ch.member(census.as_slice()[census.len() - 1].as_str())?;
                let u = ch.locally_plain(&first, |io| input::<bool>(io, "u:"))?;
                let v = ch.locally_plain(&last, |io| input::<bool>(io, "v:"))?;
                let us = secret_share(ch, &first, &u)?;
                let vs = secret_share(ch, &last, &v)?;
                let w = f_and(ch, &ToyRsa::default(), &us, &vs)?;
                let x = reveal(ch, &w)?;
                ch.parallel_plain(&everyone, |io| {
                    io.put_output("Result:", show_bool(x));
                    Ok(())
                })
                .map(drop)
            }
            Scenario::Gmw { circuit, .. } => {
                let shares = gmw(ch, &ToyRsa::default(), circuit)?;
                let x = reveal(ch, &shares)?;
                ch.parallel_plain(&everyone, |io| {
                    io.put_output("Result:", show_bool(x));
                    Ok(())
                })
                .map(drop)
            }
            Scenario::Lottery {
                clients,
                servers,
                analyst,
                config,
                ..
            } => {
                let clients = explicit_subset(clients, ch.census())?;
                let servers = explicit_subset(servers, ch.census())?;
                let analyst = ch.member(analyst.as_str())?;
                lottery(ch, &clients, &servers, &analyst, config).map(drop)
            }
        }
    }

    /// Inputs for a headless run when no script was given, where the
    /// example has a sensible default: lottery secrets drawn from the seed.
    pub fn default_script(&self, seed: u64) -> Option<Script> {
        match self {
            Scenario::Lottery { clients, .. } => {
                let mut script = Script::default();
                for c in clients.iter() {
                    let mut rng = party_rng(seed, &format!("secret:{c}"));
                    let v = Fp::new(rng.random_range(0..i64::from(Fp::P)));
                    script.lines.entry(c.clone()).or_default().push(v.to_string());
                }
                Some(script)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.census().iter().map(LocationId::as_str).collect();
        write!(f, "{} over [{}]", self.name(), names.join(", "))
    }
}

/// Input lines per party.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Script {
    pub lines: BTreeMap<LocationId, Vec<String>>,
}

impl Script {
    /// One `role: value` per line. Blank lines and lines starting with `#`
    /// are skipped; everything after the first colon, minus one leading
    /// space, is the input line.
    pub fn parse(text: &str, census: &LocationList) -> Result<Self, String> {
        let mut script = Script::default();
        for (i, raw) in text.lines().enumerate() {
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (role, value) = raw
                .split_once(':')
                .ok_or_else(|| format!("script line {}: expected `role: value`", i + 1))?;
            let role = role.trim();
            if !census.contains(role) {
                return Err(format!("script line {}: {role:?} is not in the census", i + 1));
            }
            let value = value.strip_prefix(' ').unwrap_or(value);
            script
                .lines
                .entry(id(role)?)
                .or_default()
                .push(value.to_string());
        }
        Ok(script)
    }

    pub fn with(mut self, party: &str, lines: &[&str]) -> Self {
        let p = LocationId::new(party).expect("nonempty name");
        self.lines
            .entry(p)
            .or_default()
            .extend(lines.iter().map(|s| s.to_string()));
        self
    }

    pub fn for_party(&self, party: &LocationId) -> Vec<String> {
        self.lines.get(party).cloned().unwrap_or_default()
    }

    /// One scripted local state per census member.
    pub fn locals(&self, census: &LocationList, seed: u64) -> Vec<(LocationId, Scripted)> {
        census
            .iter()
            .map(|p| (p.clone(), Scripted::seeded(self.for_party(p), seed, p.as_str())))
            .collect()
    }
}

/// Parses `lit(0|1|true|false)`, `in(NAME)`, `and(C, C)` and `xor(C, C)`.
pub fn parse_circuit(text: &str, census: &LocationList) -> Result<Circuit, String> {
    let mut p = CircuitParser { s: text, pos: 0, census };
    let c = p.circuit()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected text at {}: {:?}", p.pos, &p.s[p.pos..]));
    }
    Ok(c)
}

struct CircuitParser<'a> {
    s: &'a str,
    pos: usize,
    census: &'a LocationList,
}

impl CircuitParser<'_> {
    fn ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.s[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        self.ws();
        if self.s[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(format!("expected {c:?} at {}", self.pos))
        }
    }

    fn word(&mut self) -> Result<&str, String> {
        self.ws();
        let rest = &self.s[self.pos..];
        let len = rest
            .find(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(format!("expected a name at {}", self.pos));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn circuit(&mut self) -> Result<Circuit, String> {
        let head = self.word()?.to_ascii_lowercase();
        self.expect('(')?;
        let c = match head.as_str() {
            "lit" => match self.word()?.to_ascii_lowercase().as_str() {
                "1" | "true" => Circuit::LitWire(true),
                "0" | "false" => Circuit::LitWire(false),
                other => return Err(format!("not a literal: {other:?}")),
            },
            "in" => {
                let name = self.word()?.to_string();
                let m = explicit_member(&name, self.census).map_err(|e: WitnessError| e.to_string())?;
                Circuit::InputWire(m)
            }
            "and" | "xor" => {
                let l = self.circuit()?;
                self.expect(',')?;
                let r = self.circuit()?;
                if head == "and" {
                    Circuit::and(l, r)
                } else {
                    Circuit::xor(l, r)
                }
            }
            other => return Err(format!("unknown gate {other:?}")),
        };
        self.expect(')')?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(names: &[&str]) -> LocationList {
        LocationList::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn parses_circuits() {
        let c = census(&["a", "b"]);
        let got = parse_circuit(" and( in(a) , xor(lit(1), in(b)) ) ", &c).unwrap();
        let a = explicit_member("a", &c).unwrap();
        let b = explicit_member("b", &c).unwrap();
        assert_eq!(
            got,
            Circuit::and(
                Circuit::InputWire(a),
                Circuit::xor(Circuit::LitWire(true), Circuit::InputWire(b))
            )
        );
        assert!(parse_circuit("in(z)", &c).is_err());
        assert!(parse_circuit("or(lit(1), lit(0))", &c).is_err());
        assert!(parse_circuit("lit(1) extra", &c).is_err());
        assert!(parse_circuit("and(lit(1)", &c).is_err());
    }

    #[test]
    fn parses_scripts() {
        let c = census(&["a", "b"]);
        let s = Script::parse("# header\na: put k v\n\nb:True\na:  two spaces\n", &c).unwrap();
        assert_eq!(s.for_party(&id("a").unwrap()), vec!["put k v", " two spaces"]);
        assert_eq!(s.for_party(&id("b").unwrap()), vec!["True"]);
        assert!(Script::parse("zed: 1", &c).unwrap_err().contains("zed"));
        assert!(Script::parse("no colon", &c).is_err());
    }

    #[test]
    fn roles_build_censuses() {
        let mut roles = Roles::new();
        roles.insert("clients".into(), vec!["x".into(), "y".into()]);
        let s = Scenario::from_roles("lottery", &roles, None, None).unwrap();
        assert_eq!(s.census(), &census(&["x", "y", "s1", "s2", "s3", "analyst"]));
        assert!(Scenario::from_roles("nope", &roles, None, None).unwrap_err().contains("lottery"));
        assert!(Scenario::from_roles("kvs", &roles, None, None).is_err());
        assert!(Scenario::from_roles("kvs", &Roles::new(), None, Some("s1")).is_err());
    }
}
