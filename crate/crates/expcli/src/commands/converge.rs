//! `expcli converge`: final-time global error against a shared reference
//! over a stepsize sweep, with successive-halving order estimates.

use std::time::Instant;

use extphase::{
    integrate, reference_solution, Hamiltonian, IntegratorSpec, ObserverHooks, State,
};
use rayon::prelude::*;

use crate::commands::header;
use crate::config::{build_problem, family_order, step_count, Config, ProblemSetup};
use crate::output::{write_csv, Cell};
use crate::{CliError, CommonArgs};

const DEFAULT_METHODS: [&str; 6] = [
    "expsymp2", "irk2", "semisymp2", "expsymp4", "irk4", "semisymp4",
];

pub fn exec(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config)?;
    let problem = build_problem(&cfg)?;
    let methods = cfg.str_list_or("sweep.methods", &DEFAULT_METHODS);
    let hs = cfg.f64_list("sweep.h")?;
    if hs.len() < 3 {
        return Err(CliError::Config(format!(
            "sweep.h needs at least 3 values, got {}",
            hs.len()
        )));
    }
    let t_end = cfg.f64("run.t_end")?;
    let tol = cfg.f64_or("method.tol", 1e-13)?;
    let max_iters = cfg.usize_or("method.max_iters", 500)?;
    let agreement = cfg.f64_or("run.reference_agreement", 1e-10)?;
    let output = cfg.str_or("run.output", "converge.csv").to_string();
    let seed = args.seed.unwrap_or(cfg.u64_or("run.seed", 0)?);
    cfg.finish()?;
    let specs: Vec<(String, extphase::Family, extphase::Order)> = methods
        .iter()
        .map(|m| family_order(m).map(|(f, o)| (m.clone(), f, o)))
        .collect::<Result<_, _>>()?;
    let steps: Vec<usize> = hs
        .iter()
        .map(|&h| step_count(t_end, h))
        .collect::<Result<_, _>>()?;

    let started = Instant::now();
    let rows = match &problem {
        ProblemSetup::One { s0 } => sweep(
            &extphase::Integrable1D,
            s0,
            &specs,
            &hs,
            &steps,
            t_end,
            tol,
            max_iters,
            agreement,
            seed,
        )?,
        ProblemSetup::Pn { ham, s0 } => sweep(
            ham, s0, &specs, &hs, &steps, t_end, tol, max_iters, agreement, seed,
        )?,
    };
    write_csv(
        &args.resolve(&output),
        &header("converge", &cfg.echo_lines(), started.elapsed().as_secs_f64()),
        &["method", "h", "GE", "order"],
        &rows,
    )
}

#[allow(clippy::too_many_arguments)]
fn sweep<const D: usize, H: Hamiltonian<D> + Sync>(
    ham: &H,
    s0: &State<D>,
    specs: &[(String, extphase::Family, extphase::Order)],
    hs: &[f64],
    steps: &[usize],
    t_end: f64,
    tol: f64,
    max_iters: usize,
    agreement: f64,
    seed: u64,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let finest = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = reference_solution(ham, s0, t_end, 1, finest / 50.0, agreement, 1e-13, 500)?;
    let target = [reference.states[1]];

    let cells: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|m| (0..hs.len()).map(move |k| (m, k)))
        .collect();
    let errors: Vec<Result<f64, extphase::Error>> = cells
        .par_iter()
        .map(|&(m, k)| {
            let (_, family, order) = &specs[m];
            let spec = IntegratorSpec::<D>::new(*family, *order)
                .with_tolerance(tol, max_iters)
                .with_seed(seed);
            let mut hooks = ObserverHooks {
                sample_stride: steps[k],
                reference: Some(&target),
                ..Default::default()
            };
            let record = integrate(ham, s0, &spec, hs[k], steps[k], &mut hooks)?;
            Ok(record.samples[0].ge)
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut ge = vec![f64::NAN; cells.len()];
    for (i, e) in errors.into_iter().enumerate() {
        ge[i] = e?;
    }
    for (m, (name, _, _)) in specs.iter().enumerate() {
        for k in 0..hs.len() {
            let i = m * hs.len() + k;
            let order = if k == 0 {
                f64::NAN
            } else {
                (ge[i - 1] / ge[i]).ln() / (hs[k - 1] / hs[k]).ln()
            };
            rows.push(vec![
                Cell::Text(name.clone()),
                Cell::Num(hs[k]),
                Cell::Num(ge[i]),
                Cell::Num(order),
            ]);
        }
    }
    Ok(rows)
}
