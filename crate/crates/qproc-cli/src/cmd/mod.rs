//! Subcommand implementations. Each function takes its parsed flags plus the
//! global seed, performs the work through the library, prints a one-line
//! summary to standard output and writes data files atomically.

pub mod bench;
pub mod bs;
pub mod gen;
pub mod qaoa;
pub mod qubo;
pub mod run;
pub mod tomo;

use crate::util::{read_text, CliError, CliResult};
use qproc::noise::NoiseModel;
use std::path::Path;

/// Load an optional noise-model file; schema violations exit with code 4.
pub fn load_noise(path: Option<&Path>) -> CliResult<Option<NoiseModel>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = read_text(p)?;
            NoiseModel::from_json(&text)
                .map(Some)
                .map_err(|e| CliError::Schema(format!("{}: {e}", p.display())))
        }
    }
}
