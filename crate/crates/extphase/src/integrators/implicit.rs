//! Implicit symplectic baselines and an explicit-Euler control method.

use crate::autodiff::grad;
use crate::error::Error;
use crate::flows::Hamiltonian;
use crate::integrators::StepResult;
use crate::phase::{embed, State};

/// Canonical vector field (dp/dt, dq/dt) = (-H_q, H_p), packed in a State.
pub(crate) fn canonical_field<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    z: &State<D>,
) -> Result<State<D>, Error> {
    let g = grad(ham, z)?;
    let mut f = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        f.p[k] = -g.dq[k];
        f.q[k] = g.dp[k];
    }
    Ok(f)
}

fn axpy<const D: usize>(z: &State<D>, a: f64, f: &State<D>) -> State<D> {
    let mut out = *z;
    for k in 0..D {
        out.p[k] += a * f.p[k];
        out.q[k] += a * f.q[k];
    }
    out
}

fn lincomb<const D: usize>(a: f64, f: &State<D>, b: f64, g: &State<D>) -> State<D> {
    let mut out = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        out.p[k] = a * f.p[k] + b * g.p[k];
        out.q[k] = a * f.q[k] + b * g.q[k];
    }
    out
}

fn distance<const D: usize>(a: &State<D>, b: &State<D>) -> f64 {
    let mut acc = 0.0;
    for k in 0..D {
        acc += (a.p[k] - b.p[k]).powi(2) + (a.q[k] - b.q[k]).powi(2);
    }
    acc.sqrt()
}

fn on_manifold_result<const D: usize>(state: State<D>, iterations: usize) -> StepResult<D> {
    StepResult {
        state,
        extended: embed(&state),
        iterations_used: iterations,
        discrepancy_pre_projection: 0.0,
    }
}

/// One implicit-midpoint step, z1 = z0 + h f((z0 + z1) / 2), solved by
/// fixed-point iteration from the explicit-Euler predictor. Symplectic,
/// symmetric, order two. Iteration stops when successive iterates differ
/// by less than `tol` in the two-norm.
pub fn implicit_midpoint_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    tol: f64,
    max_iters: usize,
) -> Result<StepResult<D>, Error> {
    let f0 = canonical_field(ham, s)?;
    let mut z = axpy(s, h, &f0);
    for iteration in 1..=max_iters {
        let mut mid = State::new([0.0; D], [0.0; D]);
        for k in 0..D {
            mid.p[k] = 0.5 * (s.p[k] + z.p[k]);
            mid.q[k] = 0.5 * (s.q[k] + z.q[k]);
        }
        let f = canonical_field(ham, &mid)?;
        let next = axpy(s, h, &f);
        let residual = distance(&next, &z);
        z = next;
        if residual < tol {
            return Ok(on_manifold_result(z, iteration));
        }
    }
    // One more pass to report the final contraction residual.
    let mut mid = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        mid.p[k] = 0.5 * (s.p[k] + z.p[k]);
        mid.q[k] = 0.5 * (s.q[k] + z.q[k]);
    }
    let f = canonical_field(ham, &mid)?;
    let residual = distance(&axpy(s, h, &f), &z);
    Err(Error::NonConvergence {
        iterations: max_iters,
        residual,
    })
}

/// Displacement of one two-stage Gauss collocation step, z1 - z0, solved
/// by fixed-point iteration on the stage increments. Working with the
/// increments keeps every iterated quantity at the scale of h times the
/// field, so the step's rounding error is set by the increment magnitude
/// rather than the state magnitude; the long-horizon reference marches
/// accumulate these displacements with compensated summation.
pub(crate) fn gauss4_increment<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    tol: f64,
    max_iters: usize,
) -> Result<(State<D>, usize), Error> {
    let root3 = 3.0_f64.sqrt();
    let a11 = 0.25;
    let a12 = 0.25 - root3 / 6.0;
    let a21 = 0.25 + root3 / 6.0;
    let a22 = 0.25;
    let c1 = 0.5 - root3 / 6.0;
    let c2 = 0.5 + root3 / 6.0;

    let zero = State::new([0.0; D], [0.0; D]);
    let f0 = canonical_field(ham, s)?;
    let mut k1 = axpy(&zero, c1 * h, &f0);
    let mut k2 = axpy(&zero, c2 * h, &f0);
    for iteration in 1..=max_iters {
        let f1 = canonical_field(ham, &axpy(s, 1.0, &k1))?;
        let f2 = canonical_field(ham, &axpy(s, 1.0, &k2))?;
        let n1 = lincomb(h * a11, &f1, h * a12, &f2);
        let n2 = lincomb(h * a21, &f1, h * a22, &f2);
        let residual = (distance(&n1, &k1).powi(2) + distance(&n2, &k2).powi(2)).sqrt();
        k1 = n1;
        k2 = n2;
        if residual < tol {
            let f1 = canonical_field(ham, &axpy(s, 1.0, &k1))?;
            let f2 = canonical_field(ham, &axpy(s, 1.0, &k2))?;
            return Ok((lincomb(0.5 * h, &f1, 0.5 * h, &f2), iteration));
        }
    }
    let f1 = canonical_field(ham, &axpy(s, 1.0, &k1))?;
    let f2 = canonical_field(ham, &axpy(s, 1.0, &k2))?;
    let n1 = lincomb(h * a11, &f1, h * a12, &f2);
    let n2 = lincomb(h * a21, &f1, h * a22, &f2);
    let residual = (distance(&n1, &k1).powi(2) + distance(&n2, &k2).powi(2)).sqrt();
    Err(Error::NonConvergence {
        iterations: max_iters,
        residual,
    })
}

/// One step of the two-stage Gauss collocation Runge-Kutta method.
///
/// Butcher tableau: a11 = a22 = 1/4, a12 = 1/4 - sqrt(3)/6,
/// a21 = 1/4 + sqrt(3)/6, b1 = b2 = 1/2, nodes c_i = 1/2 -+ sqrt(3)/6.
/// The coefficients satisfy b_i a_ij + b_j a_ji - b_i b_j = 0, so the
/// method is symplectic; it is of order four. Stage values are solved by
/// fixed-point iteration from Euler predictors to the collocation nodes.
pub fn gauss4_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    tol: f64,
    max_iters: usize,
) -> Result<StepResult<D>, Error> {
    let (dz, iterations) = gauss4_increment(ham, s, h, tol, max_iters)?;
    Ok(on_manifold_result(axpy(s, 1.0, &dz), iterations))
}

/// One explicit-Euler step. First order and not symplectic; bundled only
/// as a control method for convergence and symplecticity-defect tests.
pub fn euler_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
) -> Result<StepResult<D>, Error> {
    let f = canonical_field(ham, s)?;
    Ok(on_manifold_result(axpy(s, h, &f), 1))
}
