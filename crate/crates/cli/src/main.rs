use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gl2ind_cli::{emit, preset, run, ConfigError, Format, PartialConfig, RunOptions, Suite};

#[derive(Parser)]
#[command(name = "gl2ind", version, about = "Exact checks on compact inductions of GL2 weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a report.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// One of: ramified-dim-gt1, ramified-dim1, unramified-generic,
    /// unramified-maximal, qp-control.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<Suite>>,
    /// Largest truncation depth N.
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    /// Record per-check wall-clock time (reports are then not reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, hide = true)]
    inject_failure: bool,
}

fn resolve(args: &VerifyArgs) -> Result<gl2ind_cli::Config, ConfigError> {
    if args.config.is_none() && args.preset.is_none() {
        return Err(ConfigError::new("arguments", "one of --config or --preset is required"));
    }
    let mut partial = match &args.preset {
        Some(name) => preset(name)?,
        None => PartialConfig::default(),
    };
    if let Some(path) = &args.config {
        partial = partial.overlay(PartialConfig::load(path)?);
    }
    partial = partial.overlay(PartialConfig {
        suites: args.suites.clone(),
        trunc: args.trunc,
        seed: args.seed,
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..PartialConfig::default()
    });
    partial.resolve()
}

fn verify(args: VerifyArgs) -> ExitCode {
    let config = match resolve(&args) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        timing: args.timing,
        jobs: args.jobs,
        inject_failure: args.inject_failure,
    };
    let report = match run(&config, &opts) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    let bytes = emit(&report, args.format);
    let written = match &config.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(err) = written {
        eprintln!("cannot write report: {err}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => verify(args),
    }
}
