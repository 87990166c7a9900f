//! Command implementations, run configuration and JSON reports for the
//! `carrier` binary.

pub mod algebra;
pub mod analysis;
pub mod config;
pub mod fixtures;
pub mod oracle;
pub mod report;
pub mod suite;

use thiserror::Error;

/// Errors that map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("malformed JSON in {source_name}: {detail} (see docs/report-schema.md#{schema})")]
    Json {
        source_name: String,
        detail: String,
        schema: String,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn input_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Deserializes a JSON input, pointing at the schema section on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source_name: &str, schema: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        source_name: source_name.to_string(),
        detail: e.to_string(),
        schema: schema.to_string(),
    })
}
