//! Configuration-driven reflection positivity checks.
//!
//! A run loads a TOML configuration (see `configs/README.md`), assembles the
//! Hamiltonian, and runs the spectral criterion, the brute-force oracle, or
//! both, producing a [`report::Report`].

pub mod bundled;
pub mod config;
pub mod report;
pub mod run;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rp_core::Error),
}

pub use config::{Overrides, RunConfig};
pub use report::{Report, Verdict};
pub use run::{run, Command};
