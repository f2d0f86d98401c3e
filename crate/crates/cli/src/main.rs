use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod emit;
mod verify;

use config::{Loaded, RunConfig};

#[derive(Parser)]
#[command(name = "rabuild")]
#[command(about = "Right-angled buildings, tree-wall trees and the universal-group isomorphism")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Delta,
    Tilde,
}

#[derive(Subcommand)]
enum Commands {
    /// Run every check and exit 0 iff nothing is violated
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config radius
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
        /// Write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the sampled products added to the standard sample
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a ball, tree-wall or incidence graph
    Emit {
        #[arg(value_enum)]
        what: emit::Target,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, value_enum, default_value = "dot")]
        format: emit::Format,
        /// Defaults to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "delta")]
        building: Which,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn load(path: &Path) -> Result<Loaded> {
    RunConfig::read(path)?.load()
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Commands::Verify { config, radius, format, out, seed } => {
            let loaded = match load(&config) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("invalid config: {e:#}");
                    return Ok(ExitCode::from(EXIT_INVALID));
                }
            };
            let r = radius.unwrap_or(loaded.config.radius);
            let report = verify::run(&loaded, r, seed)?;
            let json = serde_json::to_string_pretty(&report)?;
            match format {
                ReportFormat::Text => print!("{}", report.to_text()),
                ReportFormat::Json => println!("{json}"),
            }
            if let Some(p) = out.as_ref().or(loaded.config.report.as_ref()) {
                std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(if report.violation_count() == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
        }
        Commands::Emit { what, config, radius, format, out, building } => {
            let loaded = match load(&config) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("invalid config: {e:#}");
                    return Ok(ExitCode::from(EXIT_INVALID));
                }
            };
            let spec = match building {
                Which::Delta => loaded.correspondence.delta(),
                Which::Tilde => loaded.correspondence.tilde(),
            };
            let r = radius.unwrap_or(loaded.config.radius);
            let text = emit::render(spec, what, format, r)?;
            write_out(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
