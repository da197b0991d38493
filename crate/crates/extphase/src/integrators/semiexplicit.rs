//! Semiexplicit symmetric-projection integrator.
//!
//! One step perturbs the embedded state by A^T rho before the extended map
//! and adds the same A^T rho after it, where A(p, x, q, y) = (p - x, q - y)
//! reads off the gap between the two solution copies. The 2d-vector rho is
//! chosen so the result lands back on the diagonal submanifold; because the
//! same perturbation brackets a symmetric map, the overall step is
//! symmetric and symplectic. The solve is quasi-Newton (Broyden): the
//! Jacobian of the residual is 4I + O(h), so the iteration starts from
//! that matrix and needs no derivative evaluations.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::flows::Hamiltonian;
use crate::integrators::projection_methods::composed_strang;
use crate::integrators::{Order, StepResult};
use crate::phase::{embed, ExtendedState, State};

/// One semiexplicit step of the given order (2, or 4 via the triple-jump
/// composition of the order-2 extended base). Iteration stops when the
/// residual norm (the post-step gap between the copies) drops below `tol`.
pub fn semiexplicit_step<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    h: f64,
    order: Order,
    tol: f64,
    max_iters: usize,
) -> Result<StepResult<D>, Error> {
    let n = 2 * D;
    // Residual F(rho) = A [Phi_h(embed(s) + A^T rho) + A^T rho]; returns
    // the shifted extended state alongside so the final state needs no
    // recomputation.
    let evaluate = |rho: &DVector<f64>| -> Result<(ExtendedState<D>, DVector<f64>), Error> {
        let mut e = embed(s);
        for k in 0..D {
            e.p[k] += rho[k];
            e.x[k] -= rho[k];
            e.q[k] += rho[D + k];
            e.y[k] -= rho[D + k];
        }
        let mut out = composed_strang(ham, &e, h, order)?;
        for k in 0..D {
            out.p[k] += rho[k];
            out.x[k] -= rho[k];
            out.q[k] += rho[D + k];
            out.y[k] -= rho[D + k];
        }
        let mut f = DVector::zeros(n);
        for k in 0..D {
            f[k] = out.p[k] - out.x[k];
            f[D + k] = out.q[k] - out.y[k];
        }
        Ok((out, f))
    };

    let mut rho = DVector::zeros(n);
    let (mut ext, mut f) = evaluate(&rho)?;
    let mut jac = DMatrix::identity(n, n) * 4.0;
    let mut iterations = 0;
    while f.norm() > tol {
        if iterations >= max_iters {
            return Err(Error::NonConvergence {
                iterations,
                residual: f.norm(),
            });
        }
        iterations += 1;
        let delta = match jac.clone().lu().solve(&(-&f)) {
            Some(d) => d,
            None => {
                // A degenerate Broyden update poisoned the matrix; restart
                // from the analytic leading term.
                jac = DMatrix::identity(n, n) * 4.0;
                jac.clone().lu().solve(&(-&f)).expect("4I is invertible")
            }
        };
        let rho_next = &rho + &delta;
        let (ext_next, f_next) = evaluate(&rho_next)?;
        let denom = delta.dot(&delta);
        if denom > 0.0 {
            let y = &f_next - &f;
            jac += (y - &jac * &delta) * delta.transpose() / denom;
        }
        rho = rho_next;
        ext = ext_next;
        f = f_next;
    }

    // The converged copies agree to within tol; average them to produce
    // the single returned state.
    let mut state = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        state.p[k] = 0.5 * (ext.p[k] + ext.x[k]);
        state.q[k] = 0.5 * (ext.q[k] + ext.y[k]);
    }
    Ok(StepResult {
        state,
        extended: ext,
        iterations_used: iterations,
        discrepancy_pre_projection: f.norm(),
    })
}
