//! Exact sub-flows used by the extended phase space splitting schemes.
//!
//! Doubling a system H(p, q) into coordinates (p, x, q, y) with
//! Gamma(p, x, q, y) = H(p, y) + H(x, q) splits Gamma into two pieces whose
//! flows are exact translations: each piece depends only on coordinates it
//! does not move. A third quadratic piece, the binding term
//! (omega / 2) (|p - x|^2 + |q - y|^2), has a closed-form rotation flow and
//! is used to control the drift between the two copies.

use crate::autodiff::{grad, Real};
use crate::error::Error;
use crate::phase::{ExtendedState, State};

/// A Hamiltonian written against the scalar abstraction so that one
/// definition serves both plain evaluation and forward-mode gradients.
pub trait Hamiltonian<const D: usize>: Sync {
    fn eval<S: Real>(&self, p: &[S; D], q: &[S; D]) -> S;

    /// H evaluated at a phase-space point with plain floats.
    fn value(&self, z: &State<D>) -> f64 {
        self.eval(&z.p, &z.q)
    }
}

/// Coupling strength of the binding flow between the two phase space copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingStrength(pub f64);

/// Exact time-t flow of H(p, y): (p, y) are frozen, so the gradient is
/// constant along the flow and the update is a translation,
/// x -> x - t H_q(p, y) and q -> q + t H_p(p, y).
pub fn flow_a<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    t: f64,
) -> Result<ExtendedState<D>, Error> {
    let g = grad(ham, &State::new(e.p, e.y))?;
    let mut out = *e;
    for k in 0..D {
        out.x[k] = e.x[k] - t * g.dq[k];
        out.q[k] = e.q[k] + t * g.dp[k];
    }
    Ok(out)
}

/// Exact time-t flow of H(x, q): (x, q) are frozen and the update is the
/// translation p -> p - t H_q(x, q) and y -> y + t H_p(x, q).
pub fn flow_b<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    e: &ExtendedState<D>,
    t: f64,
) -> Result<ExtendedState<D>, Error> {
    let g = grad(ham, &State::new(e.x, e.q))?;
    let mut out = *e;
    for k in 0..D {
        out.p[k] = e.p[k] - t * g.dq[k];
        out.y[k] = e.y[k] + t * g.dp[k];
    }
    Ok(out)
}

/// Exact time-t flow of the binding term
/// (omega / 2) (|p - x|^2 + |q - y|^2).
///
/// The sums p + x and q + y are invariant; the differences rotate rigidly
/// at angular rate 2 omega:
/// dp(t) = cos(2 omega t) dp0 - sin(2 omega t) dq0 and
/// dq(t) = sin(2 omega t) dp0 + cos(2 omega t) dq0.
pub fn flow_c<const D: usize>(
    e: &ExtendedState<D>,
    omega: MixingStrength,
    t: f64,
) -> ExtendedState<D> {
    let angle = 2.0 * omega.0 * t;
    if angle == 0.0 {
        // Reconstructing through sums and differences would otherwise
        // reintroduce rounding on a flow that is exactly the identity.
        return *e;
    }
    let (s, c) = angle.sin_cos();
    let mut out = *e;
    for k in 0..D {
        let sum_p = e.p[k] + e.x[k];
        let sum_q = e.q[k] + e.y[k];
        let dp = e.p[k] - e.x[k];
        let dq = e.q[k] - e.y[k];
        let dp_t = c * dp - s * dq;
        let dq_t = s * dp + c * dq;
        out.p[k] = 0.5 * (sum_p + dp_t);
        out.x[k] = 0.5 * (sum_p - dp_t);
        out.q[k] = 0.5 * (sum_q + dq_t);
        out.y[k] = 0.5 * (sum_q - dq_t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::embed;
    use crate::problems::Integrable1D;

    #[test]
    fn flow_a_moves_only_x_and_q_by_the_frozen_gradient() {
        // From (0, 0, -3, -3): H_p(0, -3) = 0, H_q(0, -3) = -3, so a half
        // step sends x to 1.5 and leaves q at -3.
        let e = embed(&State::new([0.0], [-3.0]));
        let out = flow_a(&Integrable1D, &e, 0.5).unwrap();
        assert_eq!((out.p[0], out.x[0], out.q[0], out.y[0]), (0.0, 1.5, -3.0, -3.0));
    }

    #[test]
    fn flow_b_moves_only_p_and_y_by_the_frozen_gradient() {
        // Continuing from (0, 1.5, -3, -3): H_p(1.5, -3) = 1.5 * 10 = 15 and
        // H_q(1.5, -3) = -3 * 3.25 = -9.75.
        let e = ExtendedState::new([0.0], [1.5], [-3.0], [-3.0]);
        let out = flow_b(&Integrable1D, &e, 0.5).unwrap();
        assert_eq!(
            (out.p[0], out.x[0], out.q[0], out.y[0]),
            (4.875, 1.5, -3.0, 4.5)
        );
    }

    #[test]
    fn translation_flows_compose_additively_and_invert() {
        let e = ExtendedState::new([0.3], [-0.8], [1.1], [0.2]);
        let one = flow_a(&Integrable1D, &e, 0.7).unwrap();
        let split = flow_a(
            &Integrable1D,
            &flow_a(&Integrable1D, &e, 0.3).unwrap(),
            0.4,
        )
        .unwrap();
        for k in 0..1 {
            assert!((one.x[k] - split.x[k]).abs() < 1e-15);
            assert!((one.q[k] - split.q[k]).abs() < 1e-15);
        }
        let back = flow_b(
            &Integrable1D,
            &flow_b(&Integrable1D, &e, 0.7).unwrap(),
            -0.7,
        )
        .unwrap();
        for k in 0..1 {
            assert!((back.p[k] - e.p[k]).abs() < 1e-12);
            assert!((back.y[k] - e.y[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn binding_flow_preserves_sums_and_difference_norm() {
        let e = ExtendedState::new([1.0, -0.5], [0.2, 0.4], [2.0, 1.0], [-1.0, 0.3]);
        let omega = MixingStrength(1.3);
        let out = flow_c(&e, omega, 0.7);
        for k in 0..2 {
            assert!((out.p[k] + out.x[k] - (e.p[k] + e.x[k])).abs() < 1e-14);
            assert!((out.q[k] + out.y[k] - (e.q[k] + e.y[k])).abs() < 1e-14);
        }
        let norm = |s: &ExtendedState<2>| {
            (0..2)
                .map(|k| (s.p[k] - s.x[k]).powi(2) + (s.q[k] - s.y[k]).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        assert!((norm(&out) - norm(&e)).abs() < 1e-13);
    }

    #[test]
    fn binding_flow_matches_fine_step_rk4_on_the_linear_system() {
        // The binding flow solves p' = -w (q - y), x' = w (q - y),
        // q' = w (p - x), y' = -w (p - x); integrate that system with many
        // small RK4 steps and compare against the closed form.
        let e0 = ExtendedState::new([1.0, -0.5], [0.2, 0.4], [2.0, 1.0], [-1.0, 0.3]);
        let w = 1.3;
        let t_end = 0.7;
        let n = 10_000;
        let h = t_end / n as f64;
        let deriv = |s: &ExtendedState<2>| {
            let mut d = ExtendedState::new([0.0; 2], [0.0; 2], [0.0; 2], [0.0; 2]);
            for k in 0..2 {
                let dq = s.q[k] - s.y[k];
                let dp = s.p[k] - s.x[k];
                d.p[k] = -w * dq;
                d.x[k] = w * dq;
                d.q[k] = w * dp;
                d.y[k] = -w * dp;
            }
            d
        };
        let axpy = |s: &ExtendedState<2>, a: f64, d: &ExtendedState<2>| {
            let mut out = *s;
            for k in 0..2 {
                out.p[k] += a * d.p[k];
                out.x[k] += a * d.x[k];
                out.q[k] += a * d.q[k];
                out.y[k] += a * d.y[k];
            }
            out
        };
        let mut s = e0;
        for _ in 0..n {
            let k1 = deriv(&s);
            let k2 = deriv(&axpy(&s, 0.5 * h, &k1));
            let k3 = deriv(&axpy(&s, 0.5 * h, &k2));
            let k4 = deriv(&axpy(&s, h, &k3));
            let mut sum = k1;
            for k in 0..2 {
                sum.p[k] += 2.0 * k2.p[k] + 2.0 * k3.p[k] + k4.p[k];
                sum.x[k] += 2.0 * k2.x[k] + 2.0 * k3.x[k] + k4.x[k];
                sum.q[k] += 2.0 * k2.q[k] + 2.0 * k3.q[k] + k4.q[k];
                sum.y[k] += 2.0 * k2.y[k] + 2.0 * k3.y[k] + k4.y[k];
            }
            s = axpy(&s, h / 6.0, &sum);
        }
        let exact = flow_c(&e0, MixingStrength(w), t_end);
        for k in 0..2 {
            assert!((s.p[k] - exact.p[k]).abs() < 1e-10);
            assert!((s.x[k] - exact.x[k]).abs() < 1e-10);
            assert!((s.q[k] - exact.q[k]).abs() < 1e-10);
            assert!((s.y[k] - exact.y[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn binding_flow_is_periodic_with_period_pi_over_omega() {
        let e = ExtendedState::new([0.9], [-0.1], [0.4], [1.7]);
        let w = 2.5;
        let out = flow_c(&e, MixingStrength(w), std::f64::consts::PI / w);
        assert!((out.p[0] - e.p[0]).abs() < 1e-12);
        assert!((out.x[0] - e.x[0]).abs() < 1e-12);
        assert!((out.q[0] - e.q[0]).abs() < 1e-12);
        assert!((out.y[0] - e.y[0]).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_makes_the_binding_flow_the_identity() {
        let e = ExtendedState::new([0.9], [-0.1], [0.4], [1.7]);
        let out = flow_c(&e, MixingStrength(0.0), 3.7);
        assert_eq!((out.p[0], out.x[0], out.q[0], out.y[0]), (e.p[0], e.x[0], e.q[0], e.y[0]));
    }
}
