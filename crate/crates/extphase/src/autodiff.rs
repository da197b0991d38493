//! Scalar forward-mode automatic differentiation with dual numbers.
//!
//! A [`Dual`] carries a value and one directional-derivative coefficient.
//! Evaluating a Hamiltonian on duals with the i-th coordinate seeded
//! (deriv = 1) yields the exact partial derivative with respect to that
//! coordinate. Gradients are taken by 2d single-direction passes; with
//! d <= 5 in all bundled problems this is simpler than batched duals and
//! fast enough.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::Error;
use crate::flows::Hamiltonian;
use crate::phase::State;

/// Scalar abstraction enabling Hamiltonians to be written once and
/// evaluated on plain floats or dual numbers.
///
/// The elementary operation set (+, -, *, /, powi, sqrt, sin, cos, exp, ln)
/// covers both bundled Hamiltonians.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// The value part (primal component) of the scalar.
    fn value(self) -> f64;
    fn powi(self, n: i32) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
}

/// A first-order dual number: value plus one directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    /// The function value.
    pub value: f64,
    /// The directional derivative coefficient.
    pub deriv: f64,
}

impl Dual {
    /// Lift a constant: derivative 0.
    pub fn constant(value: f64) -> Self {
        Dual { value, deriv: 0.0 }
    }

    /// Lift the seeded variable: derivative 1.
    pub fn seeded(value: f64) -> Self {
        Dual { value, deriv: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value / rhs.value,
            deriv: (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

impl Real for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(1.0);
        }
        Dual {
            value: self.value.powi(n),
            deriv: f64::from(n) * self.value.powi(n - 1) * self.deriv,
        }
    }
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        Dual {
            value: r,
            deriv: self.deriv / (2.0 * r),
        }
    }
    fn sin(self) -> Self {
        Dual {
            value: self.value.sin(),
            deriv: self.value.cos() * self.deriv,
        }
    }
    fn cos(self) -> Self {
        Dual {
            value: self.value.cos(),
            deriv: -self.value.sin() * self.deriv,
        }
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Dual {
            value: e,
            deriv: e * self.deriv,
        }
    }
    fn ln(self) -> Self {
        Dual {
            value: self.value.ln(),
            deriv: self.deriv / self.value,
        }
    }
}

/// Gradient of a Hamiltonian at a state, with the function value attached.
#[derive(Debug, Clone, Copy)]
pub struct Gradient<const D: usize> {
    /// H evaluated at the state.
    pub value: f64,
    /// dH/dp, componentwise.
    pub dp: [f64; D],
    /// dH/dq, componentwise.
    pub dq: [f64; D],
}

/// Full gradient (H_p, H_q) by 2d single-direction forward passes.
///
/// Deterministic and pure. A non-finite value or derivative in any pass is
/// reported as [`Error::NonFinite`] with the offending coordinate index in
/// (p_0..p_{d-1}, q_0..q_{d-1}) order.
pub fn grad<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    z: &State<D>,
) -> Result<Gradient<D>, Error> {
    let mut out = Gradient {
        value: 0.0,
        dp: [0.0; D],
        dq: [0.0; D],
    };
    let mut p = [Dual::constant(0.0); D];
    let mut q = [Dual::constant(0.0); D];
    for i in 0..D {
        p[i] = Dual::constant(z.p[i]);
        q[i] = Dual::constant(z.q[i]);
    }
    for i in 0..D {
        p[i].deriv = 1.0;
        let r = ham.eval(&p, &q);
        p[i].deriv = 0.0;
        if !r.value.is_finite() || !r.deriv.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        out.value = r.value;
        out.dp[i] = r.deriv;
    }
    for i in 0..D {
        q[i].deriv = 1.0;
        let r = ham.eval(&p, &q);
        q[i].deriv = 0.0;
        if !r.value.is_finite() || !r.deriv.is_finite() {
            return Err(Error::NonFinite { index: D + i });
        }
        out.dq[i] = r.deriv;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::Integrable1D;

    fn d(v: f64, dv: f64) -> Dual {
        Dual { value: v, deriv: dv }
    }

    #[test]
    fn constant_has_zero_deriv_and_seed_has_one() {
        assert_eq!(Dual::constant(3.5).deriv, 0.0);
        assert_eq!(Dual::seeded(3.5).deriv, 1.0);
        assert_eq!(Dual::seeded(3.5).value, 3.5);
    }

    #[test]
    fn elementary_ops_follow_chain_rule() {
        let x = Dual::seeded(2.0);
        let y = Dual::constant(3.0);

        let s = x + y;
        assert_eq!((s.value, s.deriv), (5.0, 1.0));
        let m = x * x;
        assert_eq!((m.value, m.deriv), (4.0, 4.0));
        let q = y / x;
        assert_eq!(q.value, 1.5);
        assert!((q.deriv - (-0.75)).abs() < 1e-15);
        let p3 = x.powi(3);
        assert_eq!((p3.value, p3.deriv), (8.0, 12.0));
        let r = x.sqrt();
        assert!((r.deriv - 1.0 / (2.0 * 2.0_f64.sqrt())).abs() < 1e-15);
        let sn = x.sin();
        assert!((sn.deriv - 2.0_f64.cos()).abs() < 1e-15);
        let cs = x.cos();
        assert!((cs.deriv + 2.0_f64.sin()).abs() < 1e-15);
        let ex = x.exp();
        assert!((ex.deriv - 2.0_f64.exp()).abs() < 1e-15);
        let ln = x.ln();
        assert!((ln.deriv - 0.5).abs() < 1e-15);
    }

    #[test]
    fn composed_expression_matches_hand_derivative() {
        // f(x) = sin(x^2) * exp(x) at x = 0.7
        // f'(x) = 2 x cos(x^2) exp(x) + sin(x^2) exp(x)
        let x0 = 0.7_f64;
        let x = Dual::seeded(x0);
        let f = (x * x).sin() * x.exp();
        let expect = 2.0 * x0 * (x0 * x0).cos() * x0.exp() + (x0 * x0).sin() * x0.exp();
        assert!((f.deriv - expect).abs() < 1e-14);
        assert!((f.value - (x0 * x0).sin() * x0.exp()).abs() < 1e-15);
    }

    #[test]
    fn powi_zero_is_constant_one() {
        let z = d(0.0, 1.0).powi(0);
        assert_eq!((z.value, z.deriv), (1.0, 0.0));
    }

    #[test]
    fn grad_of_bundled_oscillator_at_unit_point() {
        // H = (1 + p^2)(1 + q^2)/2, so H_p = p(1 + q^2), H_q = q(1 + p^2).
        let g = grad(&Integrable1D, &State::new([1.0], [0.0])).unwrap();
        assert!((g.dp[0] - 1.0).abs() < 1e-15);
        assert!((g.dq[0] - 0.0).abs() < 1e-15);
        assert!((g.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grad_at_initial_condition() {
        let g = grad(&Integrable1D, &State::new([0.0], [-3.0])).unwrap();
        assert!((g.dp[0] - 0.0).abs() < 1e-15);
        assert!((g.dq[0] - (-3.0)).abs() < 1e-15);
        assert!((g.value - 5.0).abs() < 1e-15);
    }

    #[test]
    fn unused_variable_has_zero_gradient_component() {
        // A Hamiltonian that ignores q entirely.
        struct POnly;
        impl Hamiltonian<1> for POnly {
            fn eval<S: Real>(&self, p: &[S; 1], _q: &[S; 1]) -> S {
                p[0] * p[0]
            }
        }
        let g = grad(&POnly, &State::new([2.0], [7.0])).unwrap();
        assert_eq!(g.dq[0], 0.0);
        assert!((g.dp[0] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn grad_agrees_with_central_differences_at_random_points() {
        // Fixed-seed LCG keeps the test deterministic without extra deps.
        let mut s = 0x9e3779b97f4a7c15_u64;
        let mut unit = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 6.0 - 3.0
        };
        let eps = 1e-6;
        for _ in 0..100 {
            let z = State::new([unit()], [unit()]);
            let g = grad(&Integrable1D, &z).unwrap();
            let hp = (Integrable1D.eval(&[z.p[0] + eps], &[z.q[0]])
                - Integrable1D.eval(&[z.p[0] - eps], &[z.q[0]]))
                / (2.0 * eps);
            let hq = (Integrable1D.eval(&[z.p[0]], &[z.q[0] + eps])
                - Integrable1D.eval(&[z.p[0]], &[z.q[0] - eps]))
                / (2.0 * eps);
            assert!((g.dp[0] - hp).abs() < 1e-6, "dHdp mismatch at {:?}", z);
            assert!((g.dq[0] - hq).abs() < 1e-6, "dHdq mismatch at {:?}", z);
        }
    }

    #[test]
    fn grad_is_linear_in_the_hamiltonian() {
        struct Sum;
        impl Hamiltonian<1> for Sum {
            fn eval<S: Real>(&self, p: &[S; 1], q: &[S; 1]) -> S {
                Integrable1D.eval(p, q) + Integrable1D.eval(p, q)
            }
        }
        struct Scaled;
        impl Hamiltonian<1> for Scaled {
            fn eval<S: Real>(&self, p: &[S; 1], q: &[S; 1]) -> S {
                S::from_f64(2.5) * Integrable1D.eval(p, q)
            }
        }
        let z = State::new([0.4], [-1.2]);
        let g = grad(&Integrable1D, &z).unwrap();
        let gs = grad(&Sum, &z).unwrap();
        let gc = grad(&Scaled, &z).unwrap();
        assert!((gs.dp[0] - 2.0 * g.dp[0]).abs() < 1e-15);
        assert!((gs.dq[0] - 2.0 * g.dq[0]).abs() < 1e-15);
        assert!((gc.dp[0] - 2.5 * g.dp[0]).abs() < 1e-15);
        assert!((gc.dq[0] - 2.5 * g.dq[0]).abs() < 1e-15);
    }

    #[test]
    fn non_finite_pass_reports_coordinate_index() {
        struct InvQ;
        impl Hamiltonian<2> for InvQ {
            fn eval<S: Real>(&self, p: &[S; 2], q: &[S; 2]) -> S {
                p[0] + p[1] + q[0] + S::one() / q[1]
            }
        }
        let err = grad(&InvQ, &State::new([0.0, 0.0], [1.0, 0.0])).unwrap_err();
        match err {
            Error::NonFinite { index } => assert_eq!(index, 0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
