//! Command-line drivers, configuration and deterministic CSV/JSON output for the
//! workspace's geometric-phase, open-system, fuzzy-geometry and Koopman models.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{execute, run_to_dir, sha256_hex, Command, CommandOutput, RunManifest, MANIFEST};
pub use config::RunConfig;
pub use error::CliError;
pub use table::{compare_csv, format_real, Cell, Table};
