//! Explicit projection integrators and raw extended-space step maps.

use crate::error::Error;
use crate::flows::{Hamiltonian, MixingStrength};
use crate::integrators::splitting::{strang_extended, tao_strang, triple_jump_strang, yoshida4};
use crate::integrators::{Mixing, Order, StepResult};
use crate::phase::{
    discrepancy, embed, project_double_factor, project_weighted, ExtendedState, FactorPair,
    ProjectionMode, State, WeightVectors,
};

/// The extended one-step map of the requested order: the symmetric
/// three-flow step for order 2, its triple-jump composition for order 4.
pub(crate) fn composed_strang<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    h: f64,
    order: Order,
) -> Result<ExtendedState<D>, Error> {
    match order {
        Order::Two => strang_extended(ham, e, h),
        Order::Four => triple_jump_strang(ham, e, h),
    }
}

/// Replace both copies by their means: p, x <- (p + x)/2 and
/// q, y <- (q + y)/2. Lands exactly on the diagonal submanifold and is
/// idempotent.
pub fn midpoint_permutation<const D: usize>(e: &ExtendedState<D>) -> ExtendedState<D> {
    let mut out = *e;
    for k in 0..D {
        let mp = 0.5 * (e.p[k] + e.x[k]);
        let mq = 0.5 * (e.q[k] + e.y[k]);
        out.p[k] = mp;
        out.x[k] = mp;
        out.q[k] = mq;
        out.y[k] = mq;
    }
    out
}

/// One explicit symplectic step: embed, apply the extended map of the
/// configured order, then project with the alternating two-factor weighted
/// average. `step_index` (1-based) selects the parity of the factor roles.
/// The induced map on (p, q) is symplectic and of the composed order.
pub fn exp_symp_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    order: Order,
    factors: FactorPair,
    step_index: u64,
) -> Result<StepResult<D>, Error> {
    let ext = composed_strang(ham, &embed(s), h, order)?;
    let delta = discrepancy(&ext);
    let state = project_double_factor(&ext, factors, step_index);
    Ok(StepResult {
        state,
        extended: ext,
        iterations_used: 0,
        discrepancy_pre_projection: delta,
    })
}

/// One projection step with per-component weight vectors in standard mode:
/// p_k from (p~_k, x~_k) with lambda_k and q_k from (q~_k, y~_k) with xi_k.
pub fn weighted_projection_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    order: Order,
    weights: &WeightVectors<D>,
) -> Result<StepResult<D>, Error> {
    let ext = composed_strang(ham, &embed(s), h, order)?;
    let delta = discrepancy(&ext);
    let state = project_weighted(&ext, weights, ProjectionMode::Standard)?;
    Ok(StepResult {
        state,
        extended: ext,
        iterations_used: 0,
        discrepancy_pre_projection: delta,
    })
}

/// One raw extended-space step: the symmetric three-flow map, then the
/// midpoint permutation when requested. No re-embedding: the state passed
/// in is evolved as-is, so without mixing the two copies drift apart over
/// long runs even though the extended energy stays nearly conserved.
pub fn pihajoki_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    h: f64,
    mix: Mixing,
) -> Result<ExtendedState<D>, Error> {
    let out = strang_extended(ham, e, h)?;
    Ok(match mix {
        Mixing::None => out,
        Mixing::MidpointPermutation => midpoint_permutation(&out),
    })
}

/// One raw extended-space step of the five-stage composition with the
/// rotational binding flow in the middle. No re-embedding.
pub fn tao_run_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    h: f64,
    omega: MixingStrength,
) -> Result<ExtendedState<D>, Error> {
    tao_strang(ham, e, omega, h)
}
