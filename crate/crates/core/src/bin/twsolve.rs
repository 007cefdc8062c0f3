use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twsolve::algsolve::Limits;
use twsolve::pipeline::{
    exit, parse_bindings, parse_degrees, parse_kinds, run_balance, run_catalog, run_reduce,
    run_solve, Outcome, PipelineError, RunConfig,
};
use twsolve::solutions::OutputFormat;

/// Traveling-wave solutions of polynomial evolution systems by the tanh method.
#[derive(Parser)]
#[command(name = "twsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: reduce, balance, solve, assemble and verify.
    Solve(Opts),
    /// Print the traveling-wave ODE system.
    Reduce(Opts),
    /// Print the balanced ansatz degrees.
    Balance(Opts),
    /// Check the published MkdV solutions numerically.
    Catalog(Opts),
}

#[derive(Args)]
struct Opts {
    /// Input system in the .pde format.
    input: PathBuf,
    #[arg(long, default_value = "lambda")]
    wave_speed: String,
    /// Ansatz degrees M,N; bypasses balancing.
    #[arg(long)]
    degrees: Option<String>,
    /// Branch kinds to assemble.
    #[arg(long, default_value = "tanh,coth,tan,cot,rational")]
    kinds: String,
    /// Verification modes.
    #[arg(long, default_value = "symbolic,numeric")]
    verify: String,
    /// Numeric bindings such as k=-1,eta=1/3,a0=2/5.
    #[arg(long, default_value = "")]
    bind: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = Limits::default().max_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = Limits::default().max_branches)]
    max_branches: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Accepted for reproducible invocations; the pipeline itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn config(opts: &Opts) -> Result<RunConfig, PipelineError> {
    let mut c = RunConfig {
        wave_speed: opts.wave_speed.clone(),
        degrees: opts.degrees.as_deref().map(parse_degrees).transpose()?,
        kinds: parse_kinds(&opts.kinds)?,
        format: opts.format,
        limits: Limits {
            max_depth: opts.max_depth,
            max_branches: opts.max_branches,
        },
        ..RunConfig::default()
    };
    let modes: Vec<&str> = opts
        .verify
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .collect();
    if let Some(bad) = modes.iter().find(|m| !["symbolic", "numeric"].contains(m)) {
        return Err(PipelineError::Argument(format!(
            "unknown verification mode `{bad}`"
        )));
    }
    c.verify_symbolic = modes.contains(&"symbolic");
    c.verify_numeric = modes.contains(&"numeric");
    c.numeric.bindings.extend(parse_bindings(&opts.bind)?);
    c.numeric.tol = opts.tol;
    Ok(c)
}

type Runner = fn(&str, &RunConfig) -> Result<Outcome, PipelineError>;

fn init_logging() {
    let level = match std::env::var("TWSOLVE_LOG").as_deref() {
        Ok("quiet") => "off",
        Ok("info") => "info",
        Ok("debug") => "debug",
        _ => "warn",
    };
    env_logger::Builder::new()
        .parse_filters(level)
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let (opts, run): (&Opts, Runner) = match &cli.command {
        Command::Solve(o) => (o, run_solve),
        Command::Reduce(o) => (o, run_reduce),
        Command::Balance(o) => (o, run_balance),
        Command::Catalog(o) => (o, run_catalog),
    };
    log::debug!("seed {}", opts.seed);
    let source = match std::fs::read_to_string(&opts.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opts.input.display());
            return ExitCode::from(exit::IO as u8);
        }
    };
    let outcome = config(opts).and_then(|c| run(&source, &c));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", opts.input.display());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match &opts.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(exit::IO as u8);
            }
        }
        None => print!("{}", outcome.report),
    }
    ExitCode::from(outcome.code as u8)
}
