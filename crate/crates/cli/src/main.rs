//! `besov`: Besov smoothness measurements from the command line.
//!
//! Every run is driven by one JSON configuration (all fields optional,
//! strict about unknown keys) plus `--set path=value` leaf overrides.
//! Payload outputs are byte-identical across reruns of the same
//! configuration; wall-clock metadata goes to a sidecar file only.

mod bgf;
mod commands;
mod config;
mod descriptor;
mod emit;
mod error;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::emit::Json;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "besov",
    version,
    about = "Besov norms by dyadic decomposition and by mollifier rates"
)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one configuration leaf, e.g. --set besov.s=1.5
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    set: Vec<String>,

    /// Output directory for result files (default: configuration's
    /// output_dir, falling back to the working directory).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Moment tensors, smallest surviving order, and the admissible
    /// smoothness interval of the configured kernel.
    AnalyzeMollifier,
    /// Dyadic Besov norm and mollifier-rate norm of the configured
    /// function, with truncation diagnostics.
    BesovNorm,
    /// Deviation-versus-scale profile and its fitted decay exponent.
    RateProfile {
        /// Fit a previously written profile instead of measuring.
        #[arg(long, value_name = "CSV")]
        from_profile: Option<PathBuf>,
    },
    /// Scale-sum convergence test for the configured kernel at
    /// smoothness besov.s.
    EtaTest,
    /// Smallest-scale cancellation diagnostic against a mean-zero
    /// test function.
    Keylem,
    /// Run the verification suite over the built-in kernel battery.
    Verify {
        /// Run only checks whose name contains this substring.
        #[arg(long, value_name = "SUBSTRING")]
        filter: Option<String>,
        /// Seed a unit-mass violation into the battery; the suite must
        /// catch it and fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = config::load(cli.config.as_deref(), &cli.set)?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));

    let (name, outcome): (&str, Outcome) = match &cli.cmd {
        Cmd::AnalyzeMollifier => ("analyze-mollifier", commands::analyze_mollifier(&cfg)?),
        Cmd::BesovNorm => ("besov-norm", commands::besov_norm_cmd(&cfg)?),
        Cmd::RateProfile { from_profile } => {
            ("rate-profile", commands::rate_profile_cmd(&cfg, from_profile.as_deref())?)
        }
        Cmd::EtaTest => ("eta-test", commands::eta_test_cmd(&cfg)?),
        Cmd::Keylem => ("keylem", commands::keylem_cmd(&cfg)?),
        Cmd::Verify { filter, inject_fault } => {
            ("verify", commands::verify_cmd(&cfg, filter.as_deref(), *inject_fault)?)
        }
    };

    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;
    for (fname, bytes) in &outcome.files {
        fs::write(out_dir.join(fname), bytes)
            .map_err(|e| CliError::config(format!("cannot write {fname}: {e}")))?;
    }
    write_sidecar(&out_dir, name, &outcome)?;

    print!("{}", outcome.stdout);
    Ok(outcome.exit)
}

/// Timestamped run metadata. This is the only output that mentions the
/// clock, so the payload files stay reproducible byte for byte.
fn write_sidecar(out_dir: &std::path::Path, command: &str, outcome: &Outcome) -> Result<(), CliError> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as i64)
        .unwrap_or(0);
    let doc = Json::Obj(vec![
        ("command", Json::Str(String::from(command))),
        ("timestamp_unix_nanos", Json::Int(stamp)),
        ("exit", Json::Int(outcome.exit as i64)),
        (
            "outputs",
            Json::Arr(outcome.files.iter().map(|(n, _)| Json::Str(n.clone())).collect()),
        ),
    ]);
    fs::write(out_dir.join("run_meta.json"), doc.render())
        .map_err(|e| CliError::config(format!("cannot write run_meta.json: {e}")))?;
    Ok(())
}
