//! `somos`: batch front end over the core library. JSON by default, CSV for
//! sequences and trajectories.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use args::*;
use output::{label_floats, Run, RunManifest, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "somos", version = somos::VERSION, about = "Somos sequences, Laurent checks, identities and the Volterra lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Terms of a recurrence over an index range.
    Generate {
        #[arg(long = "eq", value_enum, default_value_t = EqKind::Somos4)]
        eq: EqKind,
        #[command(flatten)]
        #[serde(flatten)]
        rec: RecurrenceArgs,
        #[command(flatten)]
        #[serde(flatten)]
        lin: LinearArgs,
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true, default_value = "0..11")]
        range: IndexRange,
        #[command(flatten)]
        #[serde(flatten)]
        fmt: FormatArg,
    },
    /// Symbolic iteration with exact Laurent division, then random specializations.
    LaurentCheck {
        #[arg(long = "N", default_value_t = 4)]
        #[serde(rename = "N")]
        big_n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, help = "last symbolic index (default N+8)")]
        #[serde(skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Companion EDS, curve invariants and subsequence coefficients of a Somos-4 orbit.
    Companion {
        #[command(flatten)]
        #[serde(flatten)]
        rec: RecurrenceArgs,
        #[arg(long, default_value_t = 9, help = "largest companion index")]
        order: usize,
        #[arg(long, default_value_t = 2, help = "subsequence step")]
        d: i64,
    },
    /// Integer EDS from seeds W2,W3,W4 with divisibility check.
    Ward {
        #[arg(long, value_parser = rat_list_arg, allow_hyphen_values = true, default_value = "1,2,3")]
        init: RatList,
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
    /// One randomized identity verifier.
    Verify {
        #[arg(long, value_parser = identity_arg)]
        #[serde(serialize_with = "ser_display")]
        identity: somos::identities::IdentityId,
        #[command(flatten)]
        #[serde(flatten)]
        trials: TrialArgs,
        #[arg(long, value_enum, hide = true)]
        #[serde(skip_serializing_if = "Option::is_none")]
        inject_fault: Option<FaultArg>,
    },
    /// Every identity verifier with one seed.
    VerifyAll {
        #[command(flatten)]
        #[serde(flatten)]
        trials: TrialArgs,
        #[arg(long, value_enum, hide = true)]
        #[serde(skip_serializing_if = "Option::is_none")]
        inject_fault: Option<FaultArg>,
    },
    /// Somos-N invariants and Volterra variables of one orbit.
    Lattice {
        #[command(flatten)]
        #[serde(flatten)]
        rec: RecurrenceArgs,
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true, default_value = "0..24")]
        range: IndexRange,
    },
    /// Closed-form Volterra solution: residuals, RK4 comparison, positivity.
    Volterra {
        #[command(flatten)]
        #[serde(flatten)]
        lin: LinearArgs,
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true, default_value = "1..10", help = "lattice sites")]
        range: IndexRange,
        #[arg(long, default_value_t = 1e-3)]
        dx: f64,
        #[arg(long = "x-max", default_value_t = 0.5)]
        x_max: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        #[serde(flatten)]
        fmt: FormatArg,
    },
    /// Exact power series of B, A, tau and Y.
    Series {
        #[command(flatten)]
        #[serde(flatten)]
        lin: LinearArgs,
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true, default_value = "1..4")]
        range: IndexRange,
    },
    /// The e-triangle and Eulerian numbers with their relations.
    Triangles {
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Linear recurrences for the higher tau coefficients (empirical).
    Conjecture {
        #[command(flatten)]
        #[serde(flatten)]
        lin: LinearArgs,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, value_parser = range_arg, allow_hyphen_values = true, default_value = "-5..15")]
        range: IndexRange,
    },
    /// Screens all lambda maps of size d.
    LambdaEnum {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        #[serde(flatten)]
        trials: TrialArgs,
    },
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::LaurentCheck { .. } => "laurent-check",
            Command::Companion { .. } => "companion",
            Command::Ward { .. } => "ward",
            Command::Verify { .. } => "verify",
            Command::VerifyAll { .. } => "verify-all",
            Command::Lattice { .. } => "lattice",
            Command::Volterra { .. } => "volterra",
            Command::Series { .. } => "series",
            Command::Triangles { .. } => "triangles",
            Command::Conjecture { .. } => "conjecture",
            Command::LambdaEnum { .. } => "lambda-enum",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::LaurentCheck { seed, .. } | Command::Volterra { seed, .. } => Some(*seed),
            Command::Verify { trials, .. } | Command::VerifyAll { trials, .. } | Command::LambdaEnum { trials, .. } => {
                Some(trials.seed)
            }
            _ => None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let started = Instant::now();
    let run = match commands::dispatch(&cli.command) {
        Ok(run) => run,
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(commands::CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            Run::domain(serde_json::json!({ "error": msg }))
        }
    };
    let mut stdout = std::io::stdout().lock();
    let written = match &run.csv {
        Some(csv) => stdout.write_all(csv.as_bytes()),
        None => {
            let params = serde_json::to_value(&cli.command).expect("flags serialize");
            let params = params.as_object().and_then(|o| o.values().next().cloned()).unwrap_or(params);
            let manifest = RunManifest {
                command: cli.command.name(),
                params,
                seed: cli.command.seed(),
                version: somos::VERSION,
                passed: run.passed,
                failed: run.failed,
            };
            let doc = label_floats(serde_json::json!({ "manifest": manifest, "result": run.body }));
            writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"))
        }
    };
    if written.and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_USAGE);
    }
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    ExitCode::from(run.code)
}
