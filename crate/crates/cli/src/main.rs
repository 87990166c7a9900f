use carrier_cli::config::{parse_assignment, Command, RunConfig};
use carrier_cli::report::Report;
use carrier_cli::{fixtures, suite, CliError};
use clap::builder::PossibleValuesParser;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact and numerical verification of inductive systems and weight
/// constructions. Exit status: 0 all checks pass, 1 a check is falsified,
/// 2 bad input.
#[derive(Debug, Parser)]
#[command(name = "carrier", version)]
struct Cli {
    /// Subcommand to run.
    #[arg(value_parser = PossibleValuesParser::new(Command::ALL.map(Command::name)))]
    command: String,

    /// Master seed; every random component derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Override a tolerance, `name=value`. Repeatable.
    #[arg(long = "tolerance", value_parser = parse_assignment::<f64>)]
    tolerances: Vec<(String, f64)>,

    /// Override a budget, `name=n`. Repeatable.
    #[arg(long = "budget", value_parser = parse_assignment::<u64>)]
    budgets: Vec<(String, u64)>,

    /// Input JSON file, or `@name` for a bundled fixture.
    #[arg(long)]
    input: Option<String>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the defaults of the command and exit.
    #[arg(long)]
    show_config: bool,
}

fn read_input(spec: &str) -> Result<String, CliError> {
    if let Some(name) = spec.strip_prefix('@') {
        return fixtures::get(name).map(str::to_string).ok_or_else(|| {
            CliError::Input(format!("no bundled fixture {name:?}; available: {}", fixtures::names().join(", ")))
        });
    }
    std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let command = Command::from_name(&cli.command).expect("clap checked the name");
    let input = cli.input.as_deref().map(read_input).transpose()?;
    let cfg = RunConfig::new(command, cli.seed, &cli.tolerances, &cli.budgets, input.as_deref())?;
    if cli.show_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(true);
    }
    let outcome = suite::run(&cfg, input.as_deref())?;
    let report = Report::new(&cfg, outcome);
    let bytes = report.to_bytes();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &bytes)?;
            eprintln!("{}: {} ({})", command, if report.passed { "pass" } else { "FAIL" }, path.display());
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    if let (Command::ReplayCertificate, Some(failure)) = (command, report.result.get("failure").and_then(|f| f.as_str())) {
        eprintln!("first failing identity: {failure}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
