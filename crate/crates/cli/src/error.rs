use std::path::Path;

use thiserror::Error;

/// Failures grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config files or inconsistent checkpoints.
    #[error("configuration error: {0}")]
    Config(String),
    /// Missing, unreadable or unparseable input files.
    #[error("input error: {0}")]
    Input(String),
    /// Anything that fails while running.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn input(path: &Path, e: impl std::fmt::Display) -> CliError {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn output(path: &Path, e: impl std::fmt::Display) -> CliError {
        CliError::Runtime(format!("writing {}: {e}", path.display()))
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    }
    // write-then-rename so an interrupted run never leaves a torn checkpoint
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| CliError::output(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::output(path, e))
}
