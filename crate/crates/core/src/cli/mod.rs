//! The `spop` command line: `run`, `analyze`, `oracle` and `flops`.
//!
//! Exit codes: 0 success, 2 usage, config or I/O errors, 3 numeric failures
//! (NaN loss, non-convergence, a failed oracle check).

mod analyze;
pub mod config;
mod oracle;
mod output;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use analyze::{analyze_files, summarize, write_analysis, AnalyzeSummary};
pub use config::{ExperimentConfig, ExperimentSection, Lipschitz, OptimizerEntry, ProblemSpec};
pub use oracle::run_oracle;
pub use output::write_atomic;
pub use run::{cmd_run, RunOutcome, RunSummary, Summary, THREADS_ENV};

use crate::bench::{flops_count, FlopsKind};
use crate::error::Error;
use crate::optim::{OptimizerConfig, OptimizerKind};
use crate::specfun::NsConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Format(_) | Error::Domain(_) | Error::InvalidDimensions { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(name = "spop", version, about = "Spectral-power optimizers and heavy-tail diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train every optimizer in a TOML experiment config.
    Run { config: PathBuf },
    /// Fit power laws to the spectra of MAT1 weight files.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write spectral.jsonl and summary.json here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only the largest eigenvalues in each report.
        #[arg(long)]
        truncate_esd: bool,
    },
    /// Check the closed-form Schatten-q steepest step against random samples.
    Oracle {
        /// Trust-region exponent, a number above 1 or `inf`.
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = oracle::DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = oracle::DEFAULT_DIM, value_parser = clap::value_parser!(u32).range(1..))]
        rows: u32,
        #[arg(long, default_value_t = oracle::DEFAULT_DIM, value_parser = clap::value_parser!(u32).range(1..))]
        cols: u32,
        #[arg(long, default_value_t = oracle::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Leading-order FLOPs of one update on an m x n matrix.
    Flops {
        /// `muon` or `htmuon_ns`.
        kind: FlopsKind,
        m: u64,
        n: u64,
        /// Spectral power; defaults to the htmuon_ns config default.
        #[arg(long)]
        p: Option<f64>,
        /// Newton-Schulz steps per root round; defaults to the config default.
        #[arg(long)]
        steps: Option<u64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> crate::Result<i32> {
    match cmd {
        Command::Run { config } => {
            let outcome = cmd_run(&config)?;
            for r in &outcome.summary.runs {
                let alpha = r.mean_alpha.map_or_else(|| "-".to_string(), |a| format!("{a:.4}"));
                writeln!(err, "{}: final_loss={:e} heavy_steps={} mean_alpha={alpha}", r.name, r.final_loss, r.heavy_steps)
                    .map_err(io)?;
            }
            writeln!(out, "{}", outcome.output_dir.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Analyze { files, out: dir, truncate_esd } => {
            let reports = analyze_files(&files)?;
            match dir {
                Some(dir) => write_analysis(&dir, &reports, truncate_esd)?,
                None => reports.write_jsonl(&mut *out, truncate_esd)?,
            }
            let s = summarize(&reports);
            let alpha = s.mean_alpha.map_or_else(|| "-".to_string(), |a| format!("{a:.4}"));
            writeln!(err, "layers={} failed={} mean_alpha={alpha}", s.layers, s.failed.len()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { q, delta, rows, cols, samples, seed } => {
            let check = run_oracle(q, delta, rows as usize, cols as usize, samples, seed)?;
            writeln!(out, "closed_form {:.12e}", check.closed_form).map_err(io)?;
            writeln!(out, "max_sampled {:.12e}", check.max_sampled).map_err(io)?;
            writeln!(out, "{}", if check.pass { "PASS" } else { "FAIL" }).map_err(io)?;
            Ok(if check.pass { EXIT_OK } else { EXIT_NUMERIC })
        }
        Command::Flops { kind, m, n, p, steps } => {
            let p = p.unwrap_or(OptimizerConfig::new(OptimizerKind::HtMuonNs).power);
            let steps = steps.unwrap_or(NsConfig::default().ns_steps as u64);
            writeln!(out, "{}", flops_count(kind, m, n, p, steps)?).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}
