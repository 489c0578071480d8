//! Scenario-driven front end for `macroreal-core`: parses scenario files,
//! runs the requested engine and analyses, and writes CSV/JSON results.

pub mod bundled;
pub mod output;
pub mod pipeline;
pub mod scenario;

pub use pipeline::{execute, run, RunOptions, RunResults};
pub use scenario::{parse, plan, Plan, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] macroreal_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

/// Reads a scenario from a path, or from the bundled catalog when no file
/// of that name exists.
pub fn load_scenario_text(path_or_name: &str) -> Result<String, CliError> {
    let path = std::path::Path::new(path_or_name);
    if path.exists() {
        return Ok(std::fs::read_to_string(path)?);
    }
    bundled::get(path_or_name)
        .map(str::to_owned)
        .ok_or_else(|| CliError::Validation(format!("no scenario file or bundled scenario named `{path_or_name}`")))
}
