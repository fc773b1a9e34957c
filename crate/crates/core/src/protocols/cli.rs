//! The local-effect language the example protocols use: line-oriented input,
//! labelled output, notes, and a random source.
//!
//! [`Scripted`] answers prompts from a fixed list of lines and records a
//! transcript, so a whole protocol can run headless and deterministically.
//! An interactive console implementation lives in `census-net`.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::LocalError;

pub trait Cli {
    /// One line of input in answer to `prompt`.
    fn get_input(&mut self, prompt: &str) -> Result<String, LocalError>;

    fn put_output(&mut self, label: &str, value: &str);

    fn put_note(&mut self, note: &str);

    fn rng(&mut self) -> &mut dyn RngCore;
}

/// Values that can be typed in at a prompt.
pub trait ParseInput: Sized {
    fn parse_input(line: &str) -> Option<Self>;
}

impl ParseInput for bool {
    fn parse_input(line: &str) -> Option<Self> {
        match line.trim() {
            s if s.eq_ignore_ascii_case("true") => Some(true),
            s if s.eq_ignore_ascii_case("false") => Some(false),
            _ => None,
        }
    }
}

impl ParseInput for i64 {
    fn parse_input(line: &str) -> Option<Self> {
        line.trim().parse().ok()
    }
}

impl ParseInput for String {
    fn parse_input(line: &str) -> Option<Self> {
        Some(line.to_string())
    }
}

/// Prompts until a line parses as `T`.
pub fn input<T: ParseInput>(io: &mut (impl Cli + ?Sized), prompt: &str) -> Result<T, LocalError> {
    loop {
        let line = io.get_input(prompt)?;
        match T::parse_input(&line) {
            Some(v) => return Ok(v),
            None => io.put_note(&alloc::format!("could not understand {line:?}, try again")),
        }
    }
}

/// The random source for `party` under a run-wide seed. Distinct parties
/// get independent streams.
pub fn party_rng(seed: u64, party: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(seed.to_be_bytes());
    h.update(party.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliEvent {
    Input { prompt: String, line: String },
    Output { label: String, value: String },
    Note(String),
}

/// Answers prompts from a script and records everything.
#[derive(Debug, Clone)]
pub struct Scripted {
    inputs: VecDeque<String>,
    transcript: Vec<CliEvent>,
    rng: ChaCha20Rng,
}

impl Scripted {
    pub fn new<I, S>(inputs: I, rng: ChaCha20Rng) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Scripted {
            inputs: inputs.into_iter().map(Into::into).collect(),
            transcript: Vec::new(),
            rng,
        }
    }

    /// A script for `party` whose randomness comes from `party_rng(seed, party)`.
    pub fn seeded<I, S>(inputs: I, seed: u64, party: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(inputs, party_rng(seed, party))
    }

    pub fn transcript(&self) -> &[CliEvent] {
        &self.transcript
    }

    /// `(label, value)` of every output, in order.
    pub fn outputs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.transcript.iter().filter_map(|e| match e {
            CliEvent::Output { label, value } => Some((label.as_str(), value.as_str())),
            _ => None,
        })
    }

    pub fn remaining_inputs(&self) -> usize {
        self.inputs.len()
    }
}

impl Cli for Scripted {
    fn get_input(&mut self, prompt: &str) -> Result<String, LocalError> {
        let line = self.inputs.pop_front().ok_or_else(|| LocalError::InputExhausted {
            prompt: prompt.to_string(),
        })?;
        self.transcript.push(CliEvent::Input {
            prompt: prompt.to_string(),
            line: line.clone(),
        });
        Ok(line)
    }

    fn put_output(&mut self, label: &str, value: &str) {
        self.transcript.push(CliEvent::Output {
            label: label.to_string(),
            value: value.to_string(),
        });
    }

    fn put_note(&mut self, note: &str) {
        self.transcript.push(CliEvent::Note(note.to_string()));
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        &mut self.rng
    }
}
