//! `statgeom`: run statistical-manifold diagnostics on a spec file.
//!
//! Exit codes: 0 all checks pass, 1 usage or output error, 2 some check
//! fails, 3 the spec is invalid or cannot be evaluated.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use statgeom::crosscheck::{self, DEFAULT_STEP, DEFAULT_THRESHOLD};
use statgeom::diagnostics::{self, RunOptions, DEFAULT_TOLERANCE};
use statgeom::spec::ManifoldSpec;
use statgeom::{builtins, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_SPEC: u8 = 3;

#[derive(Parser)]
#[command(name = "statgeom", version, about = "Statistical-manifold diagnostics on sampled chart points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a spec and emit the JSON report.
    Run {
        spec: PathBuf,
        /// Residual tolerance.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Number of random sample points (box corners are always added).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a builtin spec to a file.
    Export { builtin: String, path: PathBuf },
    /// List builtin names.
    List,
    /// Compare jet-based quantities with finite differences.
    Crosscheck {
        spec: PathBuf,
        /// Finite-difference step.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        h: f64,
        /// Maximum relative deviation.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Spec(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_spec_error() {
            Failure::Spec(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn load_spec(path: &Path) -> Result<ManifoldSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Spec(format!("{}: {e}", path.display())))?;
    ManifoldSpec::from_json(&text).map_err(|e| Failure::Spec(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => write_stdout(text),
    }
}

/// A closed pipe on stdout (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn execute(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Run {
            spec,
            tol,
            samples,
            seed,
            out,
        } => {
            if !(tol > 0.0) {
                return Err(Failure::Usage("--tol must be positive".into()));
            }
            if samples == Some(0) {
                return Err(Failure::Usage("--samples must be positive".into()));
            }
            let s = load_spec(&spec)?;
            let report = diagnostics::run(
                &s,
                &RunOptions {
                    tolerance: tol,
                    samples,
                    seed,
                },
            )?;
            emit(&report.to_json(), out.as_deref())?;
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| c.is_failure())
                .map(|c| c.name.as_str())
                .collect();
            if report.all_pass() {
                eprintln!("{}: all checks pass ({} points)", s.name, report.samples.points);
                Ok(0)
            } else {
                eprintln!(
                    "{}: failing checks: {:?}; flag equivalences consistent: main1={}, symmetric-ricci={}",
                    s.name, failed, report.main1.consistent, report.symmetric_ricci.consistent
                );
                Ok(EXIT_CHECK_FAILED)
            }
        }
        Command::Export { builtin, path } => {
            let b = builtins::get(&builtin).ok_or_else(|| Failure::Spec(format!("unknown builtin '{builtin}'")))?;
            emit(&b.spec.to_json(), Some(&path))?;
            Ok(0)
        }
        Command::List => {
            let mut text = builtins::names().join("\n");
            text.push('\n');
            write_stdout(&text)?;
            Ok(0)
        }
        Command::Crosscheck {
            spec,
            h,
            threshold,
            out,
        } => {
            if !(h > 0.0) {
                return Err(Failure::Usage("--h must be positive".into()));
            }
            let s = load_spec(&spec)?;
            let report = crosscheck::crosscheck(&s, h, threshold)?;
            emit(&report.to_json(), out.as_deref())?;
            eprintln!(
                "{}: max relative deviation {:.3e} (threshold {:.1e})",
                s.name, report.max_deviation, threshold
            );
            Ok(if report.pass { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Spec(msg)) => {
            eprintln!("spec error: {msg}");
            ExitCode::from(EXIT_SPEC)
        }
    }
}
