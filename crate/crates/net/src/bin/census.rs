//! Launches an example choreography as one role, or as every role at once.
//!
//! ```text
//! census --example lottery --backend memory --all --seed 42
//! census --example kvs --role client --backend tcp --config net.cfg
//! ```

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use census_core::protocols::cli::{party_rng, Scripted};
use census_core::{epp, run_network, Choreo, ChoreoError, LocationId};
use census_net::console::Console;
use census_net::scenario::{Roles, EXAMPLES};
use census_net::{
    run_in_memory, run_tcp_configured, run_tcp_loopback, NetworkConfig, PartyOutcome, Scenario, Script, TcpBackend,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Memory,
    Tcp,
}

#[derive(Debug, Parser)]
#[command(name = "census", about = "Run an example choreography", version)]
struct Args {
    /// Which example to run
    #[arg(long)]
    example: String,

    /// Run only this party's projection
    #[arg(long, conflicts_with = "all")]
    role: Option<String>,

    /// Run every party in this process
    #[arg(long)]
    all: bool,

    #[arg(long, value_enum, default_value = "memory")]
    backend: BackendKind,

    /// Network configuration file (tcp backend)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Seed for all protocol randomness
    #[arg(long)]
    seed: Option<u64>,

    /// Input script: one `role: value` line per prompt, in order
    #[arg(long)]
    script: Option<PathBuf>,

    /// Seconds to wait for any one message (memory backend)
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,

    /// Census parameter as ROLE=NAME[,NAME...]; may repeat
    #[arg(long = "census", value_name = "ROLE=NAMES")]
    census: Vec<String>,

    #[arg(long, value_delimiter = ',')]
    dealer: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    players: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    alice: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    bob: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    carroll: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    clique: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    client: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    primary: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    backups: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    parties: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    sender: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    receiver: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    clients: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    servers: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    analyst: Option<Vec<String>>,

    /// GMW circuit, e.g. `and(in(p1), xor(lit(1), in(p2)))`
    #[arg(long)]
    circuit: Option<String>,

    /// Lottery server that opens a different number than it committed to
    #[arg(long)]
    tamper: Option<String>,
}

impl Args {
    fn roles(&self) -> Result<Roles, String> {
        let mut roles = Roles::new();
        let flags = [
            ("dealer", &self.dealer),
            ("players", &self.players),
            ("alice", &self.alice),
            ("bob", &self.bob),
            ("carroll", &self.carroll),
            ("clique", &self.clique),
            ("client", &self.client),
            ("primary", &self.primary),
            ("backups", &self.backups),
            ("parties", &self.parties),
            ("sender", &self.sender),
            ("receiver", &self.receiver),
            ("clients", &self.clients),
            ("servers", &self.servers),
            ("analyst", &self.analyst),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                roles.insert(key.to_string(), clean(v));
            }
        }
        for entry in &self.census {
            let (key, names) = entry
                .split_once('=')
                .ok_or_else(|| format!("--census expects ROLE=NAMES, got {entry:?}"))?;
            let names: Vec<String> = names.split(',').map(str::to_string).collect();
            if roles.insert(key.trim().to_string(), clean(&names)).is_some() {
                return Err(format!("role {key:?} given twice"));
            }
        }
        Ok(roles)
    }
}

fn clean(names: &[String]) -> Vec<String> {
    names
        .iter()
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect()
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("census: {msg}");
    ExitCode::from(2)
}

fn report<L>(outcomes: &[PartyOutcome<Scripted, L>]) -> ExitCode {
    for o in outcomes {
        for (label, value) in o.local.outputs() {
            println!("{}: {label} {value}", o.party);
        }
    }
    let mut failed = false;
    for o in outcomes {
        if let Err(e) = &o.result {
            eprintln!("census: {e}");
            failed = true;
        }
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !EXAMPLES.contains(&args.example.as_str()) {
        return usage(format!(
            "unknown example {:?}; available examples: {}",
            args.example,
            EXAMPLES.join(", ")
        ));
    }
    let roles = match args.roles() {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let scenario = match Scenario::from_roles(&args.example, &roles, args.circuit.as_deref(), args.tamper.as_deref()) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let census = scenario.census().clone();
    if !args.all && args.role.is_none() {
        return usage("give --role NAME or --all");
    }
    if args.backend == BackendKind::Memory && !args.all {
        return usage("the memory backend runs every party in one process; use --all");
    }
    let Ok(timeout) = Duration::try_from_secs_f64(args.timeout) else {
        return usage("--timeout must be a non-negative number of seconds");
    };
    let seed = args.seed.unwrap_or_else(rand::random);
    let script = match &args.script {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match Script::parse(&text, &census) {
                Ok(s) => Some(s),
                Err(e) => return usage(e),
            },
            Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
        },
        None => None,
    };
    let config = match &args.config {
        Some(path) => match NetworkConfig::load(path) {
            Ok(c) => Some(c),
            Err(e) => return usage(e),
        },
        None => None,
    };
    let chor = |ch: &mut Choreo<'_, Scripted>| scenario.run(ch);

    if args.all {
        let Some(script) = script.or_else(|| scenario.default_script(seed)) else {
            return usage(format!("--all needs --script for {}", scenario.name()));
        };
        let locals = script.locals(&census, seed);
        let outcomes = match (args.backend, config) {
            (BackendKind::Memory, _) => run_in_memory(&census, locals, timeout, &chor),
            (BackendKind::Tcp, Some(cfg)) => match run_tcp_configured(&census, locals, cfg, &chor) {
                Ok(o) => o,
                Err(e) => return usage(e),
            },
            (BackendKind::Tcp, None) => match run_tcp_loopback(&census, locals, timeout, &chor) {
                Ok(o) => o,
                Err(e) => return usage(e),
            },
        };
        return report(&outcomes);
    }

    let role = args.role.expect("checked above");
    if !census.contains(&role) {
        let names: Vec<&str> = census.iter().map(LocationId::as_str).collect();
        return usage(format!("{role:?} is not in the census [{}]", names.join(", ")));
    }
    let me = LocationId::new(role).expect("census names are nonempty");
    let Some(config) = config else {
        return usage("the tcp backend needs --config");
    };
    if let Err(e) = config.require(&census) {
        return usage(e);
    }
    let backend = match TcpBackend::bind(me.clone(), config) {
        Ok(b) => b,
        Err(e) => return usage(e),
    };
    let result: Result<(), ChoreoError> = match script {
        Some(script) => {
            let mut local = Scripted::seeded(script.for_party(&me), seed, me.as_str());
            let run = run_network(&backend, &me, &mut local, epp(&census, chor, &me));
            let outcome = PartyOutcome {
                party: me.clone(),
                result: run.result,
                local,
                trace: run.trace,
            };
            return report(&[outcome]);
        }
        None => {
            let mut local = Console::new(party_rng(seed, me.as_str()));
            let chor = |ch: &mut Choreo<'_, Console>| scenario.run(ch);
            run_network(&backend, &me, &mut local, epp(&census, chor, &me))
                .result
                .map(drop)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("census: {e}");
            ExitCode::from(1)
        }
    }
}
