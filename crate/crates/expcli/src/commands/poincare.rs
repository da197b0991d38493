//! `expcli poincare`: raw extended-space run with optional off-diagonal
//! start, reporting the upward crossings of a chosen extended
//! coordinate. The recorded points are the primary copy's state at the
//! interpolated crossing.

use std::time::Instant;

use extphase::{
    pihajoki_step, poincare_section, tao_run_step, Error, ExtendedState, Hamiltonian, Mixing,
    MixingStrength, State,
};

use crate::commands::header;
use crate::config::{build_problem, config_err, parse_mixing, step_count, Config, ProblemSetup};
use crate::output::{write_csv, Cell};
use crate::{CliError, CommonArgs};

enum SectionMethod {
    Pihajoki(Mixing),
    Tao(MixingStrength),
}

pub fn exec(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = Config::load(&args.config)?;
    let problem = build_problem(&cfg)?;
    let h = cfg.f64("run.h")?;
    let t_end = cfg.f64("run.t_end")?;
    let n_steps = step_count(t_end, h)?;
    let method = match cfg.str_or("method.family", "pihajoki") {
        "pihajoki" => SectionMethod::Pihajoki(parse_mixing(&cfg)?),
        "tao" => SectionMethod::Tao(MixingStrength(cfg.f64_or("method.omega", 1.0)?)),
        other => {
            return Err(config_err(format!(
                "method.family must be pihajoki or tao for sections, got `{other}`"
            )))
        }
    };
    let output = cfg.str_or("run.output", "poincare.csv").to_string();

    match problem {
        ProblemSetup::One { s0 } => {
            run::<1, _>(args, &cfg, &extphase::Integrable1D, &s0, method, h, n_steps, &output)
        }
        ProblemSetup::Pn { ham, s0 } => {
            run::<5, _>(args, &cfg, &ham, &s0, method, h, n_steps, &output)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run<const D: usize, H: Hamiltonian<D>>(
    args: &CommonArgs,
    cfg: &Config,
    ham: &H,
    s0: &State<D>,
    method: SectionMethod,
    h: f64,
    n_steps: usize,
    output: &str,
) -> Result<(), CliError> {
    // Both copies start from the problem's state unless the second
    // copy is displaced explicitly.
    let x0 = cfg.f64_list_or("problem.x0", &s0.p)?;
    let y0 = cfg.f64_list_or("problem.y0", &s0.q)?;
    let section_index = cfg.usize_or("poincare.section_index", D)?;
    cfg.finish()?;
    let check = |key: &str, v: Vec<f64>| -> Result<[f64; D], CliError> {
        v.try_into()
            .map_err(|v: Vec<f64>| config_err(format!("{key} must have {D} entries, got {}", v.len())))
    };
    let mut e = ExtendedState::new(s0.p, check("problem.x0", x0)?, s0.q, check("problem.y0", y0)?);

    let started = Instant::now();
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((0.0, e));
    for step in 1..=n_steps {
        let next = match method {
            SectionMethod::Pihajoki(mix) => pihajoki_step(ham, &e, h, mix),
            SectionMethod::Tao(omega) => tao_run_step(ham, &e, h, omega),
        };
        e = next.map_err(|source| Error::StepFailed {
            step,
            source: Box::new(source),
        })?;
        samples.push((step as f64 * h, e));
    }
    let crossings = poincare_section(&samples, section_index)?;

    let mut columns = vec!["t".to_string()];
    columns.extend((0..D).map(|i| format!("q{i}")));
    columns.extend((0..D).map(|i| format!("p{i}")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Cell>> = crossings
        .iter()
        .map(|c| {
            let mut row = vec![Cell::Num(c.t)];
            row.extend(c.state.q.iter().map(|v| Cell::Num(*v)));
            row.extend(c.state.p.iter().map(|v| Cell::Num(*v)));
            row
        })
        .collect();
    write_csv(
        &args.resolve(output),
        &header("poincare", &cfg.echo_lines(), started.elapsed().as_secs_f64()),
        &column_refs,
        &rows,
    )
}
