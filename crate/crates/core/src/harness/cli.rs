use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use super::commands::{run_command, COMMANDS};
use super::config::{ExperimentConfig, GroupKind, OUT_DIR_ENV};
use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

const AFTER_HELP: &str = "\
Commands: fnorm, adapted-norm, corollary-norm, hardylast-norm, prop1-verify, dg-solve, equiv-report, hardy-ineq

Writes <command>.json and <command>.csv into --out, else $MMULT_OUT_DIR, else ./mmult-out.

Exit codes: 0 all checks passed, 2 a check failed, 3 input, usage or I/O error.";

#[derive(Parser, Debug)]
#[command(name = "mmult", version, about = "Fourier multiplier norms on martingale Hardy spaces", after_help = AFTER_HELP)]
struct Cli {
    /// Command to run (overrides the one in --config).
    command: Option<String>,
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group kind: torus or cyclic.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    /// Order of each factor.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    support: Option<usize>,
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    equivalence: Option<String>,
    /// Multiplier table: a file path, or the JSON document inline
    #[arg(long)]
    table: Option<String>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

fn usage() -> String {
    Cli::command().render_usage().to_string()
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(String::new()),
    };
    if let Some(c) = cli.command {
        cfg.command = c;
    }
    if cfg.command.is_empty() {
        return Err(Error::InvalidArgument("no command given".into()));
    }
    if let Some(g) = cli.group {
        cfg.group = g.parse::<GroupKind>()?;
    }
    macro_rules! take {
        ($($f:ident),*) => { $(if cli.$f.is_some() { cfg.$f = cli.$f; })* };
    }
    take!(depth, n, trials, samples, tol, budget, degree, channels, support, cap, equivalence, out);
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.table {
        cfg.table = Some(if t.trim_start().starts_with('{') {
            serde_json::from_str(&t).map_err(|e| Error::Parse(format!("--table: {e}")))?
        } else {
            serde_json::Value::String(t)
        });
    }
    Ok(cfg)
}

/// Parses `args` (program name first), runs the command, writes the report,
/// and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_PASS;
        }
        Err(e) => {
            let _ = e.print();
            return EXIT_INPUT;
        }
    };
    let cfg = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\n{}", usage());
            return EXIT_INPUT;
        }
    };
    let report = match run_command(&cfg) {
        Ok(r) => r,
        Err(e @ Error::UnknownCommand(_)) => {
            eprintln!("error: {e}\nknown commands: {}\n{}", COMMANDS.join(", "), usage());
            return EXIT_INPUT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let dir = cfg.output_dir();
    let (json, csv) = match report.write(&dir) {
        Ok(paths) => paths,
        Err(e) => {
            eprintln!("error: writing report to {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    for a in &report.body.assertions {
        println!("{} {}: observed {} limit {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.observed, a.limit);
    }
    println!("report: {}\ntable: {}", json.display(), csv.display());
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_ASSERTION
    }
}
