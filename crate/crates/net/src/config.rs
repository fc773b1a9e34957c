//! Network configuration files.
//!
//! One setting per line; blank lines and text after `#` are ignored:
//!
//! ```text
//! # parties
//! alice = 127.0.0.1:9001
//! bob   = 127.0.0.1:9002
//! timeout = 30   # seconds to wait for any one message
//! warmup = 10    # seconds to keep retrying connections at startup
//! ```
//!
//! `timeout` and `warmup` are reserved; every other key names a party.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use census_core::{LocationId, LocationList};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkConfig {
    pub peers: BTreeMap<LocationId, String>,
    pub timeout: Duration,
    pub warmup: Duration,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: {key} is not a number of seconds")]
    BadSeconds { line: usize, key: String },
    #[error("line {line}: {name} is listed twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: empty party name")]
    EmptyName { line: usize },
    #[error("no address configured for {0}")]
    MissingPeer(LocationId),
    #[error("cannot read config: {0}")]
    Read(String),
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            peers: BTreeMap::new(),
            timeout: Duration::from_secs(30),
            warmup: Duration::from_secs(10),
        }
    }
}

impl NetworkConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = NetworkConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            match key {
                "timeout" | "warmup" => {
                    let secs: f64 = value.parse().map_err(|_| ConfigError::BadSeconds {
                        line,
                        key: key.to_string(),
                    })?;
                    let d = Duration::try_from_secs_f64(secs).map_err(|_| ConfigError::BadSeconds {
                        line,
                        key: key.to_string(),
                    })?;
                    if key == "timeout" {
                        cfg.timeout = d;
                    } else {
                        cfg.warmup = d;
                    }
                }
                name => {
                    let id = LocationId::new(name).map_err(|_| ConfigError::EmptyName { line })?;
                    if cfg.peers.insert(id, value.to_string()).is_some() {
                        return Err(ConfigError::Duplicate {
                            line,
                            name: name.to_string(),
                        });
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fails on the first census member without an address.
    pub fn require(&self, census: &LocationList) -> Result<(), ConfigError> {
        match census.iter().find(|p| !self.peers.contains_key(*p)) {
            Some(p) => Err(ConfigError::MissingPeer(p.clone())),
            None => Ok(()),
        }
    }

    pub fn address(&self, party: &LocationId) -> Result<&str, ConfigError> {
        self.peers
            .get(party)
            .map(String::as_str)
            .ok_or_else(|| ConfigError::MissingPeer(party.clone()))
    }
}
