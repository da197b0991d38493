//! Shared execution helpers: reference construction aligned with a run's
//! sample grid, full diagnostic runs, and the row layout for time-series
//! output.

use extphase::{
    integrate, reference_solution, Hamiltonian, IntegratorSpec, ObserverHooks, Reference,
    RunRecord, State,
};

use crate::output::Cell;
use crate::CliError;

/// Whether a run computes a cross-validated reference for its GE column.
#[derive(Clone, Copy, PartialEq)]
pub enum RefMode {
    None,
    /// Gauss reference at an internal step of h/50, cross-checked against
    /// h/100 at every sample; the gate is the largest tolerated
    /// disagreement (infinity disables the check for horizons where no
    /// numerical reference can be certified).
    Auto { agreement: f64 },
}

pub fn build_reference<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    h: f64,
    n_steps: usize,
    stride: usize,
    mode: RefMode,
) -> Result<Option<Reference<D>>, CliError> {
    let RefMode::Auto { agreement } = mode else {
        return Ok(None);
    };
    let reference = reference_solution(
        ham,
        s0,
        stride as f64 * h,
        n_steps / stride,
        h / 50.0,
        agreement,
        1e-13,
        500,
    )?;
    Ok(Some(reference))
}

/// Integrate with the standard observer wiring: the supplied sample
/// stride, an optional reference for GE, and an optional conserved-vector
/// monitor.
pub fn execute<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    spec: &IntegratorSpec<D>,
    h: f64,
    n_steps: usize,
    stride: usize,
    reference: Option<&Reference<D>>,
    invariant: Option<&dyn Fn(&State<D>) -> [f64; 3]>,
) -> Result<RunRecord, CliError> {
    let mut hooks = ObserverHooks {
        sample_stride: stride,
        reference: reference.map(|r| r.samples()),
        invariant,
        ..Default::default()
    };
    Ok(integrate(ham, s0, spec, h, n_steps, &mut hooks)?)
}

/// Column names for a time-series file; the drift columns appear only
/// when the run monitored a conserved vector.
pub fn series_columns(with_j: bool) -> Vec<&'static str> {
    if with_j {
        vec!["t", "GE", "GHE", "delta", "Jx_drift", "Jy_drift", "Jz_drift"]
    } else {
        vec!["t", "GE", "GHE", "delta"]
    }
}

pub fn series_rows(record: &RunRecord) -> Vec<Vec<Cell>> {
    record
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![
                Cell::Num(s.t),
                Cell::Num(s.ge),
                Cell::Num(s.ghe),
                Cell::Num(s.delta),
            ];
            if let Some(j) = s.j_drift {
                row.extend(j.iter().map(|v| Cell::Num(*v)));
            }
            row
        })
        .collect()
}
