//! Symmetric splitting compositions of the exact extended-space sub-flows.

use crate::error::Error;
use crate::flows::{flow_a, flow_b, flow_c, Hamiltonian, MixingStrength};
use crate::phase::ExtendedState;

/// One second-order step in extended phase space: the palindromic
/// composition flow_A(h/2), then flow_B(h), then flow_A(h/2).
///
/// Symplectic (a composition of exact Hamiltonian flows) and symmetric, so
/// applying -h after +h returns to the start up to roundoff. The A-first
/// ordering is fixed; a B-first variant would differ only in the error
/// constant.
pub fn strang_extended<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    h: f64,
) -> Result<ExtendedState<D>, Error> {
    let e1 = flow_a(ham, e, 0.5 * h)?;
    let e2 = flow_b(ham, &e1, h)?;
    flow_a(ham, &e2, 0.5 * h)
}

/// One second-order step with the binding flow in the middle:
/// flow_A(h/2), flow_B(h/2), flow_C(h), flow_B(h/2), flow_A(h/2).
///
/// At omega = 0 the middle rotation is the identity and the two B half
/// steps merge, recovering [`strang_extended`].
pub fn tao_strang<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    omega: MixingStrength,
    h: f64,
) -> Result<ExtendedState<D>, Error> {
    let e1 = flow_a(ham, e, 0.5 * h)?;
    let e2 = flow_b(ham, &e1, 0.5 * h)?;
    let e3 = flow_c(&e2, omega, h);
    let e4 = flow_b(ham, &e3, 0.5 * h)?;
    flow_a(ham, &e4, 0.5 * h)
}

/// Triple-jump coefficients (gamma1, gamma2) raising any symmetric
/// second-order one-step map to fourth order:
/// gamma1 = 1 / (2 - 2^(1/3)) and gamma2 = 1 - 2 gamma1 (negative).
pub fn triple_jump_coefficients() -> (f64, f64) {
    let gamma1 = 1.0 / (2.0 - 2.0_f64.cbrt());
    (gamma1, 1.0 - 2.0 * gamma1)
}

/// Fourth-order composition of a symmetric second-order base step:
/// base(gamma1 h), then base(gamma2 h), then base(gamma1 h).
pub fn yoshida4<T, E>(
    mut base: impl FnMut(&T, f64) -> Result<T, E>,
    e: &T,
    h: f64,
) -> Result<T, E> {
    let (g1, g2) = triple_jump_coefficients();
    let e1 = base(e, g1 * h)?;
    let e2 = base(&e1, g2 * h)?;
    base(&e2, g1 * h)
}

/// Triple-jump composition of [`strang_extended`] with the boundary A
/// stages of adjacent substeps merged. flow_A leaves its own gradient
/// arguments (p, y) unchanged, so two consecutive A stages add their
/// times and one of the two gradient evaluations can be dropped: seven
/// evaluations per step instead of the literal composition's nine. The
/// map equals yoshida4 of strang_extended up to roundoff.
pub fn triple_jump_strang<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    h: f64,
) -> Result<ExtendedState<D>, Error> {
    let (g1, g2) = triple_jump_coefficients();
    let edge = 0.5 * g1 * h;
    let merged = 0.5 * (g1 + g2) * h;
    let e1 = flow_a(ham, e, edge)?;
    let e2 = flow_b(ham, &e1, g1 * h)?;
    let e3 = flow_a(ham, &e2, merged)?;
    let e4 = flow_b(ham, &e3, g2 * h)?;
    let e5 = flow_a(ham, &e4, merged)?;
    let e6 = flow_b(ham, &e5, g1 * h)?;
    flow_a(ham, &e6, edge)
}
