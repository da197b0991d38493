//! One-dimensional nonseparable test system with bounded orbits.

use crate::autodiff::Real;
use crate::flows::Hamiltonian;

/// H(p, q) = (1 + p^2)(1 + q^2) / 2.
///
/// The product couples p and q, so the system is nonseparable, yet it is
/// integrable: H itself confines every orbit to a closed level curve. That
/// makes it a clean testbed for error growth, since the exact flow is
/// quasi-periodic and numerical error accumulates linearly at best.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integrable1D;

impl Hamiltonian<1> for Integrable1D {
    fn eval<S: Real>(&self, p: &[S; 1], q: &[S; 1]) -> S {
        let half = S::from_f64(0.5);
        half * (S::one() + p[0] * p[0]) * (S::one() + q[0] * q[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::State;

    #[test]
    fn value_at_standard_start_is_five() {
        assert_eq!(Integrable1D.value(&State::new([0.0], [-3.0])), 5.0);
    }

    #[test]
    fn value_is_symmetric_in_sign_flips() {
        let h = |p: f64, q: f64| Integrable1D.eval(&[p], &[q]);
        assert_eq!(h(0.7, -1.2), h(-0.7, 1.2));
        assert_eq!(h(0.7, -1.2), h(0.7, 1.2));
    }
}
