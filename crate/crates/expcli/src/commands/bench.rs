//! `expcli bench`: wall-clock comparison of methods sharing one stepsize
//! and horizon. Cells run sequentially so timings are not distorted by
//! contention; the median of the repetitions is reported together with
//! the achieved global error, and a companion file lists the
//! explicit-versus-implicit speedup ratios.

use std::time::Instant;

use extphase::{Hamiltonian, IntegratorSpec, State};

use crate::commands::header;
use crate::config::{build_problem, family_order, step_count, Config, ProblemSetup};
use crate::output::{write_csv, Cell};
use crate::runner::{build_reference, execute, RefMode};
use crate::{CliError, CommonArgs};

const DEFAULT_METHODS: [&str; 6] = [
    "irk2", "semisymp2", "expsymp2", "irk4", "semisymp4", "expsymp4",
];

/// Ratio rows emitted when both ends are benchmarked: implicit or
/// iterative wall clock over the same-order explicit projection method.
const RATIO_PAIRS: [(&str, &str); 4] = [
    ("irk2", "expsymp2"),
    ("irk4", "expsymp4"),
    ("semisymp2", "expsymp2"),
    ("semisymp4", "expsymp4"),
];

pub fn exec(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config)?;
    let problem = build_problem(&cfg)?;
    let methods = cfg.str_list_or("sweep.methods", &DEFAULT_METHODS);
    let h = cfg.f64("run.h")?;
    let t_end = cfg.f64("run.t_end")?;
    let n_steps = step_count(t_end, h)?;
    let reps = cfg.usize_or("bench.reps", 3)?;
    if reps < 3 {
        return Err(CliError::Config(format!(
            "bench.reps must be at least 3 for a stable median, got {reps}"
        )));
    }
    let tol = cfg.f64_or("method.tol", 1e-13)?;
    let max_iters = cfg.usize_or("method.max_iters", 500)?;
    let refmode = match cfg.str_or("run.reference", "auto") {
        "none" => RefMode::None,
        "auto" => RefMode::Auto {
            agreement: cfg.f64_or("run.reference_agreement", 1e-6)?,
        },
        other => {
            return Err(CliError::Config(format!(
                "run.reference must be none or auto, got `{other}`"
            )))
        }
    };
    let output = cfg.str_or("run.output", "bench.csv").to_string();
    let seed = args.seed.unwrap_or(cfg.u64_or("run.seed", 0)?);
    cfg.finish()?;

    let started = Instant::now();
    let measured = match &problem {
        ProblemSetup::One { s0 } => time_methods(
            &extphase::Integrable1D,
            s0,
            &methods,
            h,
            n_steps,
            reps,
            tol,
            max_iters,
            refmode,
            seed,
        )?,
        ProblemSetup::Pn { ham, s0 } => {
            time_methods(ham, s0, &methods, h, n_steps, reps, tol, max_iters, refmode, seed)?
        }
    };

    let rows: Vec<Vec<Cell>> = measured
        .iter()
        .map(|(name, median, ge)| {
            vec![
                Cell::Text(name.clone()),
                Cell::Num(h),
                Cell::Num(*median),
                Cell::Num(*ge),
            ]
        })
        .collect();
    let head = header("bench", &cfg.echo_lines(), started.elapsed().as_secs_f64());
    let path = args.resolve(&output);
    write_csv(&path, &head, &["method", "h", "median_seconds", "GE"], &rows)?;

    let mut ratio_rows = Vec::new();
    for (slow, fast) in RATIO_PAIRS {
        let a = measured.iter().find(|(n, _, _)| n == slow);
        let b = measured.iter().find(|(n, _, _)| n == fast);
        if let (Some((_, ta, _)), Some((_, tb, _))) = (a, b) {
            ratio_rows.push(vec![
                Cell::Text(format!("{slow}/{fast}")),
                Cell::Num(ta / tb),
            ]);
        }
    }
    let ratio_path = path.with_file_name(format!(
        "{}_ratios.csv",
        path.file_stem().and_then(|s| s.to_str()).unwrap_or("bench")
    ));
    write_csv(&ratio_path, &head, &["pair", "speedup"], &ratio_rows)
}

#[allow(clippy::too_many_arguments)]
fn time_methods<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    methods: &[String],
    h: f64,
    n_steps: usize,
    reps: usize,
    tol: f64,
    max_iters: usize,
    refmode: RefMode,
    seed: u64,
) -> Result<Vec<(String, f64, f64)>, CliError> {
    let reference = build_reference(ham, s0, h, n_steps, n_steps, refmode)?;
    let mut out = Vec::with_capacity(methods.len());
    for name in methods {
        let (family, order) = family_order(name)?;
        let spec = IntegratorSpec::<D>::new(family, order)
            .with_tolerance(tol, max_iters)
            .with_seed(seed);
        let mut times = Vec::with_capacity(reps);
        let mut ge = f64::NAN;
        for _ in 0..reps {
            let clock = Instant::now();
            let record = execute(ham, s0, &spec, h, n_steps, n_steps, reference.as_ref(), None)?;
            times.push(clock.elapsed().as_secs_f64());
            ge = record.samples[0].ge;
        }
        times.sort_by(f64::total_cmp);
        out.push((name.clone(), times[times.len() / 2], ge));
    }
    Ok(out)
}
