//! `expcli lyapunov`: running largest-exponent estimate from a
//! two-trajectory rescaling run, thinned to the sample stride.

use std::time::Instant;

use extphase::{lyapunov_exponent, Hamiltonian, IntegratorSpec, State};

use crate::commands::header;
use crate::config::{build_problem, build_spec, step_count, Config, ProblemSetup};
use crate::output::{write_csv, Cell};
use crate::{CliError, CommonArgs};

pub fn exec(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config)?;
    let problem = build_problem(&cfg)?;
    let h = cfg.f64("run.h")?;
    let t_end = cfg.f64("run.t_end")?;
    let n_steps = step_count(t_end, h)?;
    let stride = cfg.usize_or("run.sample_stride", 1)?.max(1);
    let d0 = cfg.f64_or("lyapunov.d0", 1e-8)?;
    let output = cfg.str_or("run.output", "lyapunov.csv").to_string();
    match problem {
        ProblemSetup::One { s0 } => {
            let spec = build_spec::<1>(&cfg, args.seed)?;
            cfg.finish()?;
            run(args, &cfg, &extphase::Integrable1D, &s0, &spec, h, n_steps, stride, d0, &output)
        }
        ProblemSetup::Pn { ham, s0 } => {
            let spec = build_spec::<5>(&cfg, args.seed)?;
            cfg.finish()?;
            run(args, &cfg, &ham, &s0, &spec, h, n_steps, stride, d0, &output)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run<const D: usize, H: Hamiltonian<D>>(
    args: &CommonArgs,
    cfg: &Config,
    ham: &H,
    s0: &State<D>,
    spec: &IntegratorSpec<D>,
    h: f64,
    n_steps: usize,
    stride: usize,
    d0: f64,
    output: &str,
) -> Result<(), CliError> {
    let started = Instant::now();
    let series = lyapunov_exponent(ham, s0, spec, h, n_steps, d0)?;
    let rows: Vec<Vec<Cell>> = series
        .iter()
        .enumerate()
        .filter(|(i, _)| (i + 1) % stride == 0)
        .map(|(_, (t, sigma))| vec![Cell::Num(*t), Cell::Num(*sigma)])
        .collect();
    write_csv(
        &args.resolve(output),
        &header("lyapunov", &cfg.echo_lines(), started.elapsed().as_secs_f64()),
        &["t", "sigma"],
        &rows,
    )
}
