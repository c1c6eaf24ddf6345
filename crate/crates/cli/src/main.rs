use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rp_certify::config::Zeta;
use rp_certify::{bundled, run, CliError, Command, Overrides, RunConfig};

/// Reflection positivity certificates for Majorana and spin Hamiltonians.
///
/// Exit status: 0 reflection positive, 2 not reflection positive (a witness
/// is printed), 1 invalid input or disagreement between criterion and oracle.
#[derive(Parser)]
#[command(name = "rp-certify", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Runs the configured mode (criterion, oracle or both).
    Check(RunArgs),
    /// Runs the brute-force oracle only.
    Oracle(RunArgs),
    /// Lists the criterion, Gram and f-matrix spectra.
    Spectrum(RunArgs),
    /// Runs a bundled scenario (or a config file) in both modes.
    Demo {
        /// Bundled scenario name or path to a config file.
        name: Option<String>,
        /// Lists the bundled scenarios.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Emits the report as JSON.
    #[arg(long)]
    json: bool,
    /// Relative PSD tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated inverse temperatures, replacing the configured list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Option<Vec<f64>>,
    /// Twist ζ of the Majorana reflection: +i or -i.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
}

impl Opts {
    fn overrides(&self) -> Result<Overrides, CliError> {
        Ok(Overrides {
            beta: self.beta.clone(),
            tolerance: self.tol,
            zeta: self.zeta.as_deref().map(Zeta::parse).transpose()?,
        })
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RP_CERTIFY_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("RP_CERTIFY_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure {n} threads: {e}")))
}

fn load(name: &str) -> Result<RunConfig, CliError> {
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e == "toml") || path.exists() {
        RunConfig::from_path(path)
    } else {
        bundled::load(name)
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let (mut cfg, command, opts) = match cli.command {
        Cmd::Check(a) => (RunConfig::from_path(&a.config)?, Command::Check, a.opts),
        Cmd::Oracle(a) => (RunConfig::from_path(&a.config)?, Command::Oracle, a.opts),
        Cmd::Spectrum(a) => (RunConfig::from_path(&a.config)?, Command::Spectrum, a.opts),
        Cmd::Demo { name, list, opts } => {
            if list {
                for n in bundled::names() {
                    println!("{n}");
                }
                return Ok(0);
            }
            let name = name.ok_or_else(|| CliError::Config("demo needs a scenario name; try --list".into()))?;
            (load(&name)?, Command::Demo, opts)
        }
    };
    cfg.apply(&opts.overrides()?);
    let report = run(&cfg, command)?;
    if opts.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(report.verdict.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
