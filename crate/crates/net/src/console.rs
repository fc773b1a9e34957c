//! Interactive local I/O on the terminal.

use std::io::{self, BufRead, Write};

use census_core::protocols::cli::Cli;
use census_core::LocalError;
use rand::RngCore;
use rand_chacha::ChaCha20Rng;

/// Prompts and notes go to standard error, outputs to standard output,
/// answers come from standard input.
pub struct Console {
    rng: ChaCha20Rng,
}

impl Console {
    pub fn new(rng: ChaCha20Rng) -> Self {
        Console { rng }
    }
}

impl Cli for Console {
    fn get_input(&mut self, prompt: &str) -> Result<String, LocalError> {
        eprint!("{prompt} ");
        let _ = io::stderr().flush();
        let mut line = String::new();
        match io::stdin().lock().read_line(&mut line) {
            Ok(0) => Err(LocalError::InputExhausted {
                prompt: prompt.to_string(),
            }),
            Ok(_) => Ok(line.trim_end_matches(['\r', '\n']).to_string()),
            Err(e) => Err(LocalError::Failed(e.to_string())),
        }
    }

    fn put_output(&mut self, label: &str, value: &str) {
        println!("{label} {value}");
    }

    fn put_note(&mut self, note: &str) {
        eprintln!("{note}");
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        &mut self.rng
    }
}
