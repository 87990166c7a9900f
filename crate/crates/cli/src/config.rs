//! Run configuration: seed, named tolerances and budgets, and the config hash.

use crate::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyLattice,
    VerifySystem,
    VerifyRegular,
    Lemma31,
    Lemmaa1,
    Theorem6,
    ReplayCertificate,
    VerifyCones,
    VerifyLemma4,
    VerifyLemma5,
    VerifyLemma6,
    VerifyLemma7,
    GsOracle,
    VerifyPsh,
    DbarDemo,
    NormsDemo,
    RunSuite,
}

impl Command {
    pub const ALL: [Command; 17] = [
        Command::VerifyLattice,
        Command::VerifySystem,
        Command::VerifyRegular,
        Command::Lemma31,
        Command::Lemmaa1,
        Command::Theorem6,
        Command::ReplayCertificate,
        Command::VerifyCones,
        Command::VerifyLemma4,
        Command::VerifyLemma5,
        Command::VerifyLemma6,
        Command::VerifyLemma7,
        Command::GsOracle,
        Command::VerifyPsh,
        Command::DbarDemo,
        Command::NormsDemo,
        Command::RunSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyLattice => "verify-lattice",
            Command::VerifySystem => "verify-system",
            Command::VerifyRegular => "verify-regular",
            Command::Lemma31 => "lemma31",
            Command::Lemmaa1 => "lemmaa1",
            Command::Theorem6 => "theorem6",
            Command::ReplayCertificate => "replay-certificate",
            Command::VerifyCones => "verify-cones",
            Command::VerifyLemma4 => "verify-lemma4",
            Command::VerifyLemma5 => "verify-lemma5",
            Command::VerifyLemma6 => "verify-lemma6",
            Command::VerifyLemma7 => "verify-lemma7",
            Command::GsOracle => "gs-oracle",
            Command::VerifyPsh => "verify-psh",
            Command::DbarDemo => "dbar-demo",
            Command::NormsDemo => "norms-demo",
            Command::RunSuite => "run-suite",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Default tolerances.
    pub fn tolerances(self) -> Vec<(String, f64)> {
        match self {
            Command::RunSuite => prefixed(Command::base_tolerances),
            c => c.base_tolerances().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    /// Default budgets.
    pub fn budgets(self) -> Vec<(String, u64)> {
        match self {
            Command::RunSuite => prefixed(Command::base_budgets),
            c => c.base_budgets().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    fn base_tolerances(self) -> Vec<(&'static str, f64)> {
        match self {
            Command::VerifyCones => vec![("route_agreement", 1e-12), ("slack", 1e-12)],
            Command::VerifyLemma4 => vec![("slack", 1e-12)],
            Command::VerifyLemma5 | Command::VerifyLemma6 | Command::VerifyLemma7 | Command::GsOracle => {
                vec![("slack", 1e-9)]
            }
            Command::VerifyPsh => vec![("quadrature", 1e-8)],
            Command::DbarDemo => vec![
                ("min_order", 1.8),
                ("residual", 1e-3),
                ("hormander_slack", 1e-6),
                ("holomorphy", 1e-3),
                ("partition_of_unity", 1e-8),
            ],
            Command::NormsDemo => vec![("boundary", 1e-6), ("slack", 1e-9)],
            _ => vec![],
        }
    }

    fn base_budgets(self) -> Vec<(&'static str, u64)> {
        match self {
            Command::VerifyLattice | Command::VerifySystem => vec![("points", 4)],
            Command::VerifyRegular => vec![("instances", 40)],
            Command::Lemma31 => vec![("instances", 200), ("vectors", 3)],
            Command::Lemmaa1 => vec![("points", 3), ("random_systems", 24)],
            Command::Theorem6 => vec![("round_trips", 100)],
            Command::VerifyCones => vec![("samples", 2000)],
            Command::VerifyLemma4 => vec![("samples", 100_000), ("grid", 10_000)],
            Command::VerifyLemma5 | Command::VerifyLemma6 | Command::VerifyLemma7 | Command::GsOracle => {
                vec![("samples", 10_000)]
            }
            Command::VerifyPsh => vec![("centers", 12), ("directions", 2), ("per_decade", 2)],
            Command::DbarDemo => vec![("n_phi", 512), ("coarsest", 128), ("levels", 3), ("hormander_grid", 400)],
            Command::NormsDemo => vec![("grid", 321)],
            _ => vec![],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The suite's defaults: every member's values under `<command>.<name>`.
fn prefixed<T>(get: fn(Command) -> Vec<(&'static str, T)>) -> Vec<(String, T)> {
    crate::suite::MEMBERS
        .iter()
        .flat_map(|&c| get(c).into_iter().map(move |(n, v)| (format!("{}.{n}", c.name()), v)))
        .collect()
}

/// Effective configuration of one run. Output paths are not part of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub budgets: BTreeMap<String, u64>,
    /// SHA-256 of the input document, when one was given.
    pub input_sha256: Option<String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

/// A 64-bit seed for one labelled component of a run.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

impl RunConfig {
    pub fn new(
        command: Command,
        seed: u64,
        tolerances: &[(String, f64)],
        budgets: &[(String, u64)],
        input: Option<&str>,
    ) -> Result<Self, CliError> {
        let mut tol: BTreeMap<String, f64> = command.tolerances().into_iter().collect();
        for (k, v) in tolerances {
            let slot = tol
                .get_mut(k)
                .ok_or_else(|| CliError::Input(format!("{command} has no tolerance named {k:?}")))?;
            if !(v.is_finite() && *v > 0.0) {
                return Err(CliError::Input(format!("tolerance {k} must be positive and finite, got {v}")));
            }
            *slot = *v;
        }
        let mut bud: BTreeMap<String, u64> = command.budgets().into_iter().collect();
        for (k, v) in budgets {
            let slot = bud
                .get_mut(k)
                .ok_or_else(|| CliError::Input(format!("{command} has no budget named {k:?}")))?;
            if *v == 0 {
                return Err(CliError::Input(format!("budget {k} must be positive")));
            }
            *slot = *v;
        }
        Ok(RunConfig {
            command,
            seed,
            tolerances: tol,
            budgets: bud,
            input_sha256: input.map(|t| sha256_hex(t.as_bytes())),
        })
    }

    pub fn defaults(command: Command, seed: u64) -> Self {
        RunConfig::new(command, seed, &[], &[], None).expect("defaults are valid")
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn budget(&self, name: &str) -> u64 {
        self.budgets[name]
    }

    pub fn budget_usize(&self, name: &str) -> usize {
        usize::try_from(self.budgets[name]).unwrap_or(usize::MAX)
    }

    pub fn seed_for(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }

    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    /// The configuration of one suite member, read from the prefixed keys.
    pub fn member(&self, command: Command) -> RunConfig {
        let prefix = format!("{}.", command.name());
        let strip = |k: &String| k.strip_prefix(&prefix).map(str::to_string);
        RunConfig {
            command,
            seed: self.seed,
            tolerances: self.tolerances.iter().filter_map(|(k, v)| strip(k).map(|k| (k, *v))).collect(),
            budgets: self.budgets.iter().filter_map(|(k, v)| strip(k).map(|k| (k, *v))).collect(),
            input_sha256: None,
        }
    }
}

/// Parses `name=value`.
pub fn parse_assignment<T: std::str::FromStr>(s: &str) -> Result<(String, T), String>
where
    T::Err: fmt::Display,
{
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = v.trim().parse::<T>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}
