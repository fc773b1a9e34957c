//! Centralized runs of every example protocol, checked against oracles
//! written independently of the protocol code.

use std::collections::{BTreeMap, VecDeque};

use census_core::locations::{explicit_subset, listed_first, listed_second, LocationList};
use census_core::protocols::card_game::card_game;
use census_core::protocols::cli::{party_rng, CliEvent, Scripted};
use census_core::protocols::example_chor::example_chor;
use census_core::protocols::gmw::{f_and, gmw, Circuit};
use census_core::protocols::kvs::{kvs, Corruption, NaryReplication};
use census_core::protocols::lottery::{lottery, LotteryConfig};
use census_core::protocols::ot::{ot2, ToyRsa};
use census_core::protocols::sharing::{reveal, secret_share};
use census_core::{run_choreo, Central, ChoreoError, Effect, LocalError, LocationId};
use rand::Rng;

fn census(names: &[&str]) -> LocationList {
    LocationList::new(names.iter().copied()).unwrap()
}

fn scripted(census: &LocationList, seed: u64, scripts: &[(&str, Vec<String>)]) -> Central<Scripted> {
    Central::for_census(census, |p| {
        let lines = scripts
            .iter()
            .find(|(n, _)| *n == p.as_str())
            .map(|(_, l)| l.clone())
            .unwrap_or_default();
        Scripted::seeded(lines, seed, p.as_str())
    })
}

fn outputs(central: &Central<Scripted>, party: &str) -> Vec<(String, String)> {
    central
        .local(party)
        .unwrap()
        .outputs()
        .map(|(l, v)| (l.to_string(), v.to_string()))
        .collect()
}

fn lines(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

// ---- card game ----

#[test]
fn card_game_matches_mod_21_oracle() {
    let c = census(&["dealer", "p1", "p2", "p3"]);
    // first cards, then second cards for players that hit, then the table card
    let first = [10i64, 15, 20];
    let hits = [false, true, true];
    let second = [0i64, 7, 22];
    let table = 10i64;
    let mut dealer: Vec<String> = first.iter().map(|f| f.to_string()).collect();
    for (i, s) in second.iter().enumerate() {
        if hits[i] {
            dealer.push(s.to_string());
        }
    }
    dealer.push(table.to_string());
    let mut scripts = vec![("dealer", dealer)];
    let players = ["p1", "p2", "p3"];
    for (i, p) in players.iter().enumerate() {
        scripts.push((p, vec![if hits[i] { "True" } else { "false" }.to_string()]));
    }
    let mut central = scripted(&c, 0, &scripts);
    run_choreo(&c, &mut central, card_game).unwrap();
    for (i, p) in players.iter().enumerate() {
        let mut hand = vec![table, first[i]];
        if hits[i] {
            hand.push(second[i]);
        }
        let expected = hand.iter().sum::<i64>() % 21 > 19;
        assert_eq!(
            outputs(&central, p),
            vec![("My win result:".to_string(), if expected { "True" } else { "False" }.to_string())],
            "{p}"
        );
    }
    assert!(outputs(&central, "dealer").is_empty());
}

#[test]
fn card_game_single_card_21_loses() {
    let c = census(&["dealer", "solo"]);
    // hand [21] is card 0; the table card 0 keeps it at 0
    let scripts = [("dealer", lines(&["21", "0"])), ("solo", lines(&["False"]))];
    let mut central = scripted(&c, 0, &scripts);
    run_choreo(&c, &mut central, card_game).unwrap();
    assert_eq!(outputs(&central, "solo")[0].1, "False");
}

#[test]
fn card_game_reprompts_on_garbage() {
    let c = census(&["dealer", "p"]);
    let scripts = [("dealer", lines(&["ten", "10", "10"])), ("p", lines(&["nah", "False"]))];
    let mut central = scripted(&c, 0, &scripts);
    run_choreo(&c, &mut central, card_game).unwrap();
    assert_eq!(outputs(&central, "p")[0].1, "True");
}

// ---- clique example ----

#[test]
fn example_chor_delivers_to_carroll_and_follows_hand_trace() {
    let c = census(&["alice", "bob", "carroll", "dave"]);
    let clique = explicit_subset(&census(&["alice", "bob", "dave"]), &c).unwrap();
    let mut central = Central::for_census(&c, |_| ()).with_effect_log();
    let alice = LocationId::new("alice").unwrap();
    let bob = LocationId::new("bob").unwrap();
    let got = run_choreo(&c, &mut central, |ch| {
        let carroll = ch.member("carroll")?;
        example_chor(ch, &clique, &alice, &bob, &carroll, 42)
    })
    .unwrap();
    assert_eq!(got.owners(), &census(&["carroll"]));
    assert_eq!(got.value_at("carroll"), Some(&42));

    // enclave; inside: bob computes, bob -> alice, alice -> clique, naked;
    // outside: bob -> carroll
    let inner = clique.subject().clone();
    let expected = vec![
        (c.clone(), Effect::Enclave { census: inner.clone() }),
        (inner.clone(), Effect::Parallel { parties: census(&["bob"]) }),
        (
            inner.clone(),
            Effect::Comm {
                sender: bob.clone(),
                recipients: census(&["alice"]),
            },
        ),
        (
            inner.clone(),
            Effect::Comm {
                sender: alice.clone(),
                recipients: inner.clone(),
            },
        ),
        (inner.clone(), Effect::Naked { owners: inner.clone() }),
        (
            c.clone(),
            Effect::Comm {
                sender: bob.clone(),
                recipients: census(&["carroll"]),
            },
        ),
    ];
    let log: Vec<_> = central
        .effect_log()
        .iter()
        .map(|r| (r.census.clone(), r.effect.clone()))
        .collect();
    assert_eq!(log, expected);
}

#[test]
fn example_chor_rejects_bob_outside_clique() {
    let c = census(&["alice", "bob", "carroll"]);
    let clique = explicit_subset(&census(&["alice", "carroll"]), &c).unwrap();
    let mut central = Central::for_census(&c, |_| ());
    let err = run_choreo(&c, &mut central, |ch| {
        let carroll = ch.member("carroll")?;
        example_chor(
            ch,
            &clique,
            &LocationId::new("alice").unwrap(),
            &LocationId::new("bob").unwrap(),
            &carroll,
            1,
        )
    })
    .unwrap_err();
    assert!(matches!(err, ChoreoError::Witness(_)));
}

// ---- sharing, OT, fAnd ----

#[test]
fn reveal_secret_share_all_dealers() {
    for n in 1..=5 {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let c = LocationList::new(names.clone()).unwrap();
        for dealer in &names {
            for x in [false, true] {
                let mut central = scripted(&c, n as u64, &[]);
                let got = run_choreo(&c, &mut central, |ch| {
                    let p = ch.member(dealer)?;
                    let v = ch.locally(&p, |_, _| Ok(x))?;
                    let s = secret_share(ch, &p, &v)?;
                    reveal(ch, &s)
                })
                .unwrap();
                assert_eq!(got, x);
            }
        }
    }
}

#[test]
fn ot_truth_table() {
    let c = census(&["snd", "rcv"]);
    for b1 in [false, true] {
        for b2 in [false, true] {
            for s in [false, true] {
                let mut central = scripted(&c, 11, &[]);
                let got = run_choreo(&c, &mut central, |ch| {
                    let sender = listed_first(ch.census())?;
                    let receiver = listed_second(ch.census())?;
                    let bb = ch.locally(&sender, |_, _| Ok((b1, b2)))?;
                    let sel = ch.locally(&receiver, |_, _| Ok(s))?;
                    ot2(ch, &ToyRsa::default(), &bb, &sel)
                })
                .unwrap();
                // select bit true picks the first message
                let oracle = if s { b1 } else { b2 };
                assert_eq!(got.value_at("rcv"), Some(&oracle), "b1={b1} b2={b2} s={s}");
            }
        }
    }
}

#[test]
fn f_and_reveals_plaintext_and() {
    for n in 1..=3 {
        let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let c = LocationList::new(names.clone()).unwrap();
        for u in [false, true] {
            for v in [false, true] {
                let mut central = scripted(&c, 17, &[]);
                let got = run_choreo(&c, &mut central, |ch| {
                    let first = ch.member(&names[0])?;
                    let last = ch.member(&names[n - 1])?;
                    let uu = ch.locally(&first, |_, _| Ok(u))?;
                    let vv = ch.locally(&last, |_, _| Ok(v))?;
                    let us = secret_share(ch, &first, &uu)?;
                    let vs = secret_share(ch, &last, &vv)?;
                    let w = f_and(ch, &ToyRsa::default(), &us, &vs)?;
                    reveal(ch, &w)
                })
                .unwrap();
                assert_eq!(got, u && v, "n={n} u={u} v={v}");
            }
        }
    }
}

// ---- GMW ----

/// Plain evaluation; each input wire consumes its owner's next input.
fn plain_eval(c: &Circuit, inputs: &mut BTreeMap<String, VecDeque<bool>>) -> bool {
    match c {
        Circuit::LitWire(b) => *b,
        Circuit::InputWire(p) => inputs.get_mut(p.subject().as_str()).unwrap().pop_front().unwrap(),
        Circuit::AndGate(l, r) => {
            let a = plain_eval(l, inputs);
            let b = plain_eval(r, inputs);
            a & b
        }
        Circuit::XorGate(l, r) => {
            let a = plain_eval(l, inputs);
            let b = plain_eval(r, inputs);
            a ^ b
        }
    }
}

fn owners_in_order(c: &Circuit, out: &mut Vec<String>) {
    match c {
        Circuit::LitWire(_) => {}
        Circuit::InputWire(p) => out.push(p.subject().to_string()),
        Circuit::AndGate(l, r) | Circuit::XorGate(l, r) => {
            owners_in_order(l, out);
            owners_in_order(r, out);
        }
    }
}

fn circuits_up_to(depth: usize, c: &LocationList) -> Vec<Circuit> {
    let mut leaves = vec![Circuit::LitWire(false), Circuit::LitWire(true)];
    for name in c.iter() {
        leaves.push(Circuit::InputWire(census_core::locations::explicit_member(name.as_str(), c).unwrap()));
    }
    let mut all = leaves.clone();
    for _ in 1..depth {
        let prev = all.clone();
        all = leaves.clone();
        for l in &prev {
            for r in &prev {
                all.push(Circuit::and(l.clone(), r.clone()));
                all.push(Circuit::xor(l.clone(), r.clone()));
            }
        }
    }
    all
}

fn check_gmw(c: &LocationList, circuit: &Circuit) -> usize {
    let mut owners = Vec::new();
    owners_in_order(circuit, &mut owners);
    let k = owners.len();
    for bits in 0..(1u32 << k) {
        let assignment: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
        let mut per_party: BTreeMap<String, VecDeque<bool>> = c.iter().map(|p| (p.to_string(), VecDeque::new())).collect();
        for (o, b) in owners.iter().zip(&assignment) {
            per_party.get_mut(o).unwrap().push_back(*b);
        }
        let scripts: Vec<(String, Vec<String>)> = per_party
            .iter()
            .map(|(p, bs)| (p.clone(), bs.iter().map(|b| if *b { "True" } else { "False" }.to_string()).collect()))
            .collect();
        let borrowed: Vec<(&str, Vec<String>)> = scripts.iter().map(|(p, l)| (p.as_str(), l.clone())).collect();
        let mut central = scripted(c, u64::from(bits), &borrowed);
        let got = run_choreo(c, &mut central, |ch| {
            let shares = gmw(ch, &ToyRsa { prime_bits: 12 }, circuit)?;
            reveal(ch, &shares)
        })
        .unwrap();
        let expected = plain_eval(circuit, &mut per_party.clone());
        assert_eq!(got, expected, "{circuit:?} with {assignment:?}");
    }
    1 << k
}

#[test]
fn gmw_xor_of_literals() {
    let c = census(&["a", "b"]);
    let mut central = scripted(&c, 0, &[]);
    let circuit = Circuit::xor(Circuit::LitWire(true), Circuit::LitWire(false));
    let got = run_choreo(&c, &mut central, |ch| {
        let s = gmw(ch, &ToyRsa::default(), &circuit)?;
        reveal(ch, &s)
    })
    .unwrap();
    assert!(got);
}

#[test]
fn gmw_literal_facets_put_the_bit_first() {
    let c = census(&["a", "b", "c"]);
    let mut central = scripted(&c, 0, &[]);
    let shares = run_choreo(&c, &mut central, |ch| gmw(ch, &ToyRsa::default(), &Circuit::LitWire(true))).unwrap();
    assert_eq!(shares.facet_at("a"), Some(&true));
    assert_eq!(shares.facet_at("b"), Some(&false));
    assert_eq!(shares.facet_at("c"), Some(&false));
}

#[test]
fn gmw_depth_two_exhaustive() {
    for names in [&["a", "b"][..], &["a", "b", "c"][..]] {
        let c = census(names);
        let circuits = circuits_up_to(2, &c);
        assert_eq!(circuits.len(), (names.len() + 2) + 2 * (names.len() + 2).pow(2));
        let runs: usize = circuits.iter().map(|k| check_gmw(&c, k)).sum();
        assert!(runs >= circuits.len());
    }
}

// ---- KVS ----

fn kvs_session(backups: &[&str], corrupt: Option<Corruption>, commands: &[&str]) -> Vec<String> {
    let mut names = vec!["client", "primary"];
    names.extend_from_slice(backups);
    let c = census(&names);
    let mut central = scripted(&c, 0, &[("client", lines(commands))]);
    run_choreo(&c, &mut central, |ch| {
        let client = ch.member("client")?;
        let primary = ch.member("primary")?;
        let backups = explicit_subset(&census(backups), ch.census())?;
        let mut strategy = NaryReplication::new(primary, backups);
        if let Some(c) = corrupt {
            strategy = strategy.with_corruption(c);
        }
        kvs(ch, &strategy, &client)
    })
    .unwrap();
    for p in names.iter().skip(1) {
        assert!(outputs(&central, p).is_empty());
    }
    outputs(&central, "client")
        .into_iter()
        .map(|(l, v)| {
            assert_eq!(l, "Received:");
            v
        })
        .collect()
}

/// The map-semantics oracle.
fn kvs_oracle(commands: &[&str]) -> Vec<String> {
    let mut m: BTreeMap<String, String> = BTreeMap::new();
    let show = |v: Option<String>| v.map_or("NotFound".to_string(), |v| format!("Found {v:?}"));
    let mut out = Vec::new();
    for c in commands {
        let w: Vec<&str> = c.split_whitespace().collect();
        match w[0] {
            "put" => out.push(show(m.insert(w[1].into(), w[2].into()))),
            "get" => out.push(show(m.get(w[1]).cloned())),
            _ => break,
        }
    }
    out
}

#[test]
fn kvs_matches_map_semantics() {
    let commands = ["put k v", "get k", "put k w", "get k", "get missing", "stop"];
    for backups in [&["b1"][..], &["b1", "b2"][..], &["b1", "b2", "b3", "b4"][..]] {
        assert_eq!(kvs_session(backups, None, &commands), kvs_oracle(&commands));
    }
}

#[test]
fn kvs_reports_desynchronization() {
    let corrupt = Corruption {
        backup: LocationId::new("b2").unwrap(),
        key: "k".into(),
        value: "evil".into(),
    };
    let got = kvs_session(&["b1", "b2"], Some(corrupt), &["get k", "get other", "stop"]);
    assert_eq!(got, vec![r#"Desynchronization [NotFound,Found "evil"]"#.to_string(), "NotFound".to_string()]);
}

#[test]
fn kvs_client_may_be_a_server() {
    let c = census(&["primary", "b1"]);
    let mut central = scripted(&c, 0, &[("b1", lines(&["put x 1", "get x", "stop"]))]);
    run_choreo(&c, &mut central, |ch| {
        let client = ch.member("b1")?;
        let primary = ch.member("primary")?;
        let backups = explicit_subset(&census(&["b1"]), ch.census())?;
        kvs(ch, &NaryReplication::new(primary, backups), &client)
    })
    .unwrap();
    let got: Vec<_> = outputs(&central, "b1").into_iter().map(|(_, v)| v).collect();
    assert_eq!(got, vec!["NotFound", "Found \"1\""]);
}

// ---- lottery ----

const P: i64 = 999_983;

fn lottery_run(seed: u64, secrets: &[i64], config: &LotteryConfig) -> (Result<(), ChoreoError>, Central<Scripted>) {
    let clients: Vec<String> = (0..secrets.len()).map(|i| format!("c{i}")).collect();
    let mut names: Vec<String> = clients.clone();
    names.extend(["s0", "s1", "s2", "analyst"].map(String::from));
    let c = LocationList::new(names).unwrap();
    let scripts: Vec<(&str, Vec<String>)> = clients
        .iter()
        .zip(secrets)
        .map(|(n, s)| (n.as_str(), vec![s.to_string()]))
        .collect();
    let mut central = scripted(&c, seed, &scripts);
    let result = run_choreo(&c, &mut central, |ch| {
        let clients = explicit_subset(&LocationList::new(clients.clone()).unwrap(), ch.census())?;
        let servers = explicit_subset(&census(&["s0", "s1", "s2"]), ch.census())?;
        let analyst = ch.member("analyst")?;
        lottery(ch, &clients, &servers, &analyst, config).map(|_| ())
    });
    (result, central)
}

#[test]
fn lottery_reveals_the_seed_chosen_client() {
    let secrets = [5, -1, 777_777];
    for seed in 0..20 {
        let (result, central) = lottery_run(seed, &secrets, &LotteryConfig::default());
        result.unwrap();
        // replay each server's first draw from the seed
        let tau = 4 * secrets.len() as i64;
        let omega: i64 = ["s0", "s1", "s2"]
            .iter()
            .map(|s| party_rng(seed, s).random_range(1..=tau))
            .sum::<i64>()
            % secrets.len() as i64;
        let expected = secrets[omega as usize].rem_euclid(P);
        assert_eq!(
            outputs(&central, "analyst"),
            vec![("The answer is:".to_string(), expected.to_string())],
            "seed {seed}"
        );
    }
}

#[test]
fn lottery_tampering_is_caught() {
    let config = LotteryConfig {
        tamper: Some(LocationId::new("s1").unwrap()),
        ..LotteryConfig::default()
    };
    let (result, central) = lottery_run(3, &[1, 2], &config);
    match result {
        Err(ChoreoError::Local { error, .. }) => assert_eq!(error, LocalError::CommitmentCheckFailed),
        other => panic!("expected a failed commitment check, got {other:?}"),
    }
    assert!(outputs(&central, "analyst").is_empty());
}

#[test]
fn lottery_needs_two_servers() {
    let c = census(&["c0", "c1", "s0", "a"]);
    let mut central = scripted(&c, 0, &[]);
    let err = run_choreo(&c, &mut central, |ch| {
        let clients = explicit_subset(&census(&["c0", "c1"]), ch.census())?;
        let servers = explicit_subset(&census(&["s0"]), ch.census())?;
        let analyst = ch.member("a")?;
        lottery(ch, &clients, &servers, &analyst, &LotteryConfig::default())
    })
    .unwrap_err();
    assert!(matches!(err, ChoreoError::Witness(_)));
}

#[test]
fn scripted_transcript_records_prompts() {
    let c = census(&["c0", "c1", "s0", "s1", "a"]);
    let mut central = scripted(&c, 1, &[("c0", lines(&["4"])), ("c1", lines(&["9"]))]);
    run_choreo(&c, &mut central, |ch| {
        let clients = explicit_subset(&census(&["c0", "c1"]), ch.census())?;
        let servers = explicit_subset(&census(&["s0", "s1"]), ch.census())?;
        let analyst = ch.member("a")?;
        lottery(ch, &clients, &servers, &analyst, &LotteryConfig::default())
    })
    .unwrap();
    assert_eq!(
        central.local("c0").unwrap().transcript(),
        &[CliEvent::Input {
            prompt: "secret:".into(),
            line: "4".into()
        }]
    );
    let answer = &outputs(&central, "a")[0].1;
    assert!(answer == "4" || answer == "9");
}
