//! The JSON report envelope shared by every subcommand.

use crate::config::RunConfig;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced: verdict, component seeds and its result body.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub seeds: BTreeMap<String, u64>,
    pub result: Value,
}

impl Outcome {
    pub fn new(passed: bool, result: impl Serialize) -> Self {
        Outcome {
            passed,
            seeds: BTreeMap::new(),
            result: serde_json::to_value(result).expect("results serialize"),
        }
    }

    pub fn with_seed(mut self, label: &str, seed: u64) -> Self {
        self.seeds.insert(label.to_string(), seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub seed: u64,
    pub seeds: BTreeMap<String, u64>,
    pub passed: bool,
    pub result: Value,
}

impl Report {
    pub fn new(config: &RunConfig, outcome: Outcome) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: config.command.name().to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            seed: config.seed,
            seeds: outcome.seeds,
            passed: outcome.passed,
            result: outcome.result,
        }
    }

    /// Pretty JSON with a trailing newline; identical inputs give identical bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports serialize");
        out.push(b'\n');
        out
    }
}
