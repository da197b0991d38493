//! Experiment driver for the extphase integrator library.
//!
//! Every subcommand reads a flat `key = value` config file, runs its
//! study, and writes CSV output with a `#`-prefixed metadata header.
//! Exit codes: 0 success, 2 config error, 3 runtime error (the failing
//! step or time is reported on standard error).

mod commands;
mod config;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(extphase::Error),
    Io(String),
}

impl From<extphase::Error> for CliError {
    fn from(e: extphase::Error) -> Self {
        CliError::Runtime(e)
    }
}

#[derive(Parser)]
#[command(name = "expcli", version, about = "Experiment driver for the extphase integrators")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
pub struct CommonArgs {
    /// Config file of flat `key = value` lines with dotted section keys.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to EXPCLI_OUT_DIR, then the current
    /// directory. Relative output paths in configs resolve against it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent sweep cells (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Override run.seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    pub fn out_dir(&self) -> PathBuf {
        if let Some(dir) = &self.out {
            return dir.clone();
        }
        if let Some(dir) = std::env::var_os("EXPCLI_OUT_DIR") {
            return PathBuf::from(dir);
        }
        PathBuf::from(".")
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        let p = PathBuf::from(file);
        if p.is_absolute() {
            p
        } else {
            self.out_dir().join(p)
        }
    }

    fn install_thread_pool(&self) {
        if let Some(jobs) = self.jobs {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build_global();
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one configured run and write its diagnostic time series.
    Run(CommonArgs),
    /// Convergence-order study over a stepsize sweep.
    Converge(CommonArgs),
    /// Wall-clock comparison of methods at a shared stepsize.
    Bench(CommonArgs),
    /// Reproduce a named result figure's data bundle.
    Figure(CommonArgs),
    /// Surface-of-section extraction from an extended-space run.
    Poincare(CommonArgs),
    /// Largest-Lyapunov-exponent estimate series.
    Lyapunov(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Cmd::Run(a) => ("run", a),
        Cmd::Converge(a) => ("converge", a),
        Cmd::Bench(a) => ("bench", a),
        Cmd::Figure(a) => ("figure", a),
        Cmd::Poincare(a) => ("poincare", a),
        Cmd::Lyapunov(a) => ("lyapunov", a),
    };
    args.install_thread_pool();
    let result = match &cli.command {
        Cmd::Run(a) => commands::run::exec(a),
        Cmd::Converge(a) => commands::converge::exec(a),
        Cmd::Bench(a) => commands::bench::exec(a),
        Cmd::Figure(a) => commands::figure::exec(a),
        Cmd::Poincare(a) => commands::poincare::exec(a),
        Cmd::Lyapunov(a) => commands::lyapunov::exec(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("expcli {name}: config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("expcli {name}: runtime error: {err}");
            if let Some(step) = err.failing_step() {
                eprintln!("expcli {name}: failing step: {step}");
            }
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("expcli {name}: io error: {msg}");
            ExitCode::from(3)
        }
    }
}
