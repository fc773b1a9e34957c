//! Running choreographies for real: in-memory and TCP backends, network
//! configuration files, a threaded harness, terminal I/O, and the catalogue
//! of runnable examples behind the `census` command.

pub mod config;
pub mod console;
pub mod harness;
pub mod memory;
pub mod scenario;
pub mod tcp;

pub use config::{ConfigError, NetworkConfig};
pub use harness::{run_in_memory, run_parties, run_tcp_configured, run_tcp_loopback, PartyOutcome};
pub use memory::MemoryBackend;
pub use scenario::{Scenario, Script};
pub use tcp::TcpBackend;
