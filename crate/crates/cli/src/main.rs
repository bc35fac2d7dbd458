mod commands;
mod error;
mod text;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Output;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "arbor-cert", version, about = "Exact certificates for arboreal Galois images over Q")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for the randomized parts of polynomial factorization.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Exit with status 1 unless the finding equals this label.
    #[arg(long, global = true, value_name = "FINDING")]
    expect: Option<String>,
    /// Store the JSON report in DIR, or compare against the stored copy.
    #[arg(long, global = true, value_name = "DIR")]
    golden: Option<PathBuf>,
    /// Largest degree handed to the factorization over Q.
    #[arg(long, global = true)]
    degree_cap: Option<usize>,
    /// Pollard rho iteration budget per integer factorization.
    #[arg(long, global = true)]
    rho_iterations: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    QuadPoly,
    CubicPoly,
    QuadRatmap,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Follow the orbit of a point.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// A rational number or `inf`.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Detect obstructions and search for per-level certificates.
    Certify {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = 100_000)]
        prime_bound: u64,
    },
    /// Certify members of the family (z^2 - 2bz + 1)/((2b - 2)z).
    Family {
        #[arg(long, allow_negative_numbers = true, required_unless_present = "b_range", conflicts_with = "b_range")]
        b: Option<i64>,
        /// Inclusive range `A..B`.
        #[arg(long, allow_hyphen_values = true)]
        b_range: Option<String>,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, default_value_t = 100_000)]
        prime_bound: u64,
    },
    /// Factor the iterates of a polynomial and classify the factor counts.
    Stability {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Discriminant of f^n - t by the closed formula and optionally by resultants.
    Disc {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        iterate: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Decide whether the map is post-critically finite.
    Pcf {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Orbit { .. } => "orbit",
            Command::Certify { .. } => "certify",
            Command::Family { .. } => "family",
            Command::Stability { .. } => "stability",
            Command::Disc { .. } => "disc",
            Command::Pcf { .. } => "pcf",
        }
    }
}

/// Everything that determines the report. Output format, `--expect` and
/// `--golden` do not, so they are left out.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
    pub degree_cap: Option<usize>,
    pub rho_iterations: Option<u64>,
}

impl RunConfig {
    fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        command: cli.command.clone(),
        seed: cli.seed,
        degree_cap: cli.degree_cap,
        rho_iterations: cli.rho_iterations,
    };
    let out = match commands::run(&config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let json = serde_json::to_string_pretty(&out.json).expect("report serializes") + "\n";
    match cli.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", out.text),
    }
    if let Some(dir) = &cli.golden {
        let path = dir.join(format!("{}-{}.json", config.command.name(), config.digest()));
        match golden(&path, &json) {
            Ok(true) => {}
            Ok(false) => {
                eprintln!("golden mismatch: {}", path.display());
                return ExitCode::from(1);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
        }
    }
    if let Some(want) = &cli.expect {
        if !expectation_met(&out, want) {
            eprintln!("expected {want}, found {}", out.findings.join(", "));
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

/// Write `json` to `path` if absent, otherwise report whether it matches.
fn golden(path: &Path, json: &str) -> Result<bool, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if path.exists() {
        return Ok(fs::read_to_string(path).map_err(io)? == json);
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, json).map_err(io)?;
    Ok(true)
}

fn expectation_met(out: &Output, want: &str) -> bool {
    !out.findings.is_empty() && out.findings.iter().all(|f| f == want)
}
