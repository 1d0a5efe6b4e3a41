//! `nc-shilov`: envelopes, cb-norm certificates and Banach–Stone
//! decompositions for operator spaces given as JSON.
//!
//! Exit status is 0 for a verified positive answer, 2 for a computed
//! negative answer and 1 for errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const MAX_TOL: f64 = 1e-2;

#[derive(Parser, Debug)]
#[command(
    name = "nc-shilov",
    version,
    about = "Operator-space envelopes and complete isometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Operator space JSON: {"ambient_dim", "basis", "unit_index"}.
    #[arg(long, global = true, value_name = "PATH")]
    space: Option<PathBuf>,

    /// Linear map JSON: {"domain", "codomain_dim", "images"}.
    #[arg(long, global = true, value_name = "PATH")]
    map: Option<PathBuf>,

    /// Numerical tolerance, in (0, 1e-2].
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Seed for randomized steps (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0xC0FFEE")]
    seed: u64,

    /// Highest amplification level to probe.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    level: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Complete contractivity certificate and level-k norm bounds of a map.
    Cbnorm,
    /// C*-envelope of a unital operator space.
    Envelope,
    /// Banach–Stone decomposition of a complete isometry.
    Decompose,
    /// Decide whether a map is a complete isometry.
    CheckIsometry,
    /// Wedderburn decomposition of the C*-algebra generated by a space.
    Blockdecomp,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Cbnorm => "cbnorm",
            Command::Envelope => "envelope",
            Command::Decompose => "decompose",
            Command::CheckIsometry => "check-isometry",
            Command::Blockdecomp => "blockdecomp",
        }
    }
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

/// Everything that determines a run; embedded in every report.
#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub space: Option<String>,
    pub map: Option<String>,
    pub tol: f64,
    pub seed: u64,
    pub level: Option<usize>,
    pub format: &'static str,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    if !(cli.tol > 0.0 && cli.tol <= MAX_TOL) {
        eprintln!("error: --tol must lie in (0, {MAX_TOL}], got {}", cli.tol);
        return ExitCode::from(1);
    }
    let config = RunConfig {
        command: cli.command.name(),
        space: cli.space.as_ref().map(|p| p.display().to_string()),
        map: cli.map.as_ref().map(|p| p.display().to_string()),
        tol: cli.tol,
        seed: cli.seed,
        level: cli.level.map(|k| k as usize),
        format: match cli.format {
            Format::Json => "json",
            Format::Text => "text",
        },
    };
    let outcome = match cli.command {
        Command::Cbnorm => commands::cbnorm(&config),
        Command::Envelope => commands::envelope(&config),
        Command::Decompose => commands::decompose(&config),
        Command::CheckIsometry => commands::check_isometry(&config),
        Command::Blockdecomp => commands::blockdecomp(&config),
    };
    match outcome {
        Ok(outcome) => {
            let status = outcome.status;
            let rendered = match cli.format {
                Format::Json => report::render_json(&config, outcome),
                Format::Text => report::render_text(&config, outcome),
            };
            println!("{rendered}");
            ExitCode::from(status as u8)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
