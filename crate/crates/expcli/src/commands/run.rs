//! `expcli run`: one integration, one CSV time series.

use std::time::Instant;

use extphase::{Hamiltonian, PNBinary, State};

use crate::commands::header;
use crate::config::{build_problem, build_spec, step_count, Config, ProblemSetup};
use crate::output::write_csv;
use crate::runner::{build_reference, execute, series_columns, series_rows, RefMode};
use crate::{CliError, CommonArgs};

pub struct RunParams {
    pub h: f64,
    pub n_steps: usize,
    pub stride: usize,
    pub output: String,
    pub refmode: RefMode,
}

pub fn run_params(cfg: &Config, default_output: &str) -> Result<RunParams, CliError> {
    let h = cfg.f64("run.h")?;
    let t_end = cfg.f64("run.t_end")?;
    let n_steps = step_count(t_end, h)?;
    let stride = cfg.usize_or("run.sample_stride", 1)?.max(1);
    let output = cfg.str_or("run.output", default_output).to_string();
    let refmode = match cfg.str_or("run.reference", "none") {
        "none" => RefMode::None,
        "auto" => RefMode::Auto {
            agreement: cfg.f64_or("run.reference_agreement", 1e-10)?,
        },
        other => {
            return Err(CliError::Config(format!(
                "run.reference must be none or auto, got `{other}`"
            )))
        }
    };
    Ok(RunParams {
        h,
        n_steps,
        stride,
        output,
        refmode,
    })
}

pub fn exec(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config)?;
    let problem = build_problem(&cfg)?;
    let params = run_params(&cfg, "run.csv")?;
    match problem {
        ProblemSetup::One { s0 } => {
            let spec = build_spec::<1>(&cfg, args.seed)?;
            cfg.finish()?;
            run_one(&extphase::Integrable1D, &s0, spec, &params, None, &cfg, args)
        }
        ProblemSetup::Pn { ham, s0 } => {
            let spec = build_spec::<5>(&cfg, args.seed)?;
            cfg.finish()?;
            let monitor = angular_momentum_monitor(&ham);
            run_one(&ham, &s0, spec, &params, Some(&monitor), &cfg, args)
        }
    }
}

pub fn angular_momentum_monitor(ham: &PNBinary) -> impl Fn(&State<5>) -> [f64; 3] + '_ {
    move |s: &State<5>| ham.total_angular_momentum(s)
}

fn run_one<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    spec: extphase::IntegratorSpec<D>,
    params: &RunParams,
    invariant: Option<&dyn Fn(&State<D>) -> [f64; 3]>,
    cfg: &Config,
    args: &CommonArgs,
) -> Result<(), CliError> {
    let started = Instant::now();
    let reference = build_reference(ham, s0, params.h, params.n_steps, params.stride, params.refmode)?;
    let record = execute(
        ham,
        s0,
        &spec,
        params.h,
        params.n_steps,
        params.stride,
        reference.as_ref(),
        invariant,
    )?;
    let path = args.resolve(&params.output);
    write_csv(
        &path,
        &header("run", &cfg.echo_lines(), started.elapsed().as_secs_f64()),
        &series_columns(invariant.is_some()),
        &series_rows(&record),
    )
}
