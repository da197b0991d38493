//! Post-Newtonian two-body problem with canonically parametrized spins.
//!
//! The system has five degrees of freedom: three orbital pairs (P_i, Q_i)
//! and two spin pairs (xi_i, theta_i). Each spin vector of fixed magnitude
//! lambda_i is parametrized by its z-component xi_i (momentum-like) and
//! azimuth theta_i (position-like),
//! S_i = (rho_i cos theta_i, rho_i sin theta_i, xi_i) with
//! rho_i = sqrt(lambda_i^2 - xi_i^2), which makes the spin evolution
//! canonical and lets the same integrators drive orbit and spins together.

use crate::autodiff::Real;
use crate::flows::Hamiltonian;
use crate::phase::State;

fn dot3<S: Real>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3<S: Real>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale3<S: Real>(a: &[S; 3], c: f64) -> [S; 3] {
    let c = S::from_f64(c);
    [a[0] * c, a[1] * c, a[2] * c]
}

fn add3<S: Real>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Spin vector from its canonical pair (xi, theta) and fixed magnitude.
///
/// On the boundary xi = +-magnitude the transverse radius rho vanishes and
/// d rho / d xi blows up; the derivative there is taken to be zero instead.
/// That choice keeps the boundary invariant (the spin stays on the pole,
/// since dH/d theta is proportional to rho = 0) and leaves the remaining
/// equations finite; only the rate of the then-unobservable azimuth is
/// affected.
pub fn spin_from_canonical<S: Real>(magnitude: f64, xi: S, theta: S) -> [S; 3] {
    let radicand = S::from_f64(magnitude * magnitude) - xi * xi;
    let rho = if radicand.value() <= 0.0 {
        S::zero()
    } else {
        radicand.sqrt()
    };
    [rho * theta.cos(), rho * theta.sin(), xi]
}

/// Which contributions to include in the Hamiltonian. Gating individual
/// terms is used by tests that pin down each contribution separately;
/// production runs use [`PNTerms::all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PNTerms {
    /// Kepler part p^2/2 - 1/r.
    pub newtonian: bool,
    /// First-order correction, weighted by 1/c^2.
    pub first_order: bool,
    /// Second-order correction, weighted by 1/c^4.
    pub second_order: bool,
    /// Spin-orbit coupling, weighted by 1/c^3.
    pub spin_orbit: bool,
    /// Spin-spin coupling, weighted by 1/c^4.
    pub spin_spin: bool,
}

impl PNTerms {
    pub fn all() -> Self {
        PNTerms {
            newtonian: true,
            first_order: true,
            second_order: true,
            spin_orbit: true,
            spin_spin: true,
        }
    }

    pub fn newtonian_only() -> Self {
        PNTerms {
            newtonian: true,
            first_order: false,
            second_order: false,
            spin_orbit: false,
            spin_spin: false,
        }
    }
}

/// Spinning compact binary in reduced variables: mass ratio beta, light
/// speed c, and fixed spin magnitudes.
#[derive(Debug, Clone, Copy)]
pub struct PNBinary {
    /// Mass ratio m1 / m2.
    pub beta: f64,
    /// Speed of light in the chosen units; the PN corrections carry inverse
    /// powers of it.
    pub c: f64,
    /// Conserved spin magnitudes lambda_1, lambda_2.
    pub spin_magnitudes: [f64; 2],
    /// Included contributions.
    pub terms: PNTerms,
}

impl PNBinary {
    pub fn new(beta: f64, c: f64, spin_magnitudes: [f64; 2]) -> Self {
        assert!(beta > 0.0, "mass ratio must be positive");
        assert!(c > 0.0, "light speed must be positive");
        PNBinary {
            beta,
            c,
            spin_magnitudes,
            terms: PNTerms::all(),
        }
    }

    /// Symmetric mass ratio eta = beta / (1 + beta)^2.
    pub fn eta(&self) -> f64 {
        self.beta / (1.0 + self.beta).powi(2)
    }

    /// Total angular momentum J = Q x P + S_1 + S_2, conserved by the full
    /// Hamiltonian and used as a drift diagnostic.
    pub fn total_angular_momentum(&self, z: &State<5>) -> [f64; 3] {
        let l = cross3(&[z.q[0], z.q[1], z.q[2]], &[z.p[0], z.p[1], z.p[2]]);
        let s1 = spin_from_canonical(self.spin_magnitudes[0], z.p[3], z.q[3]);
        let s2 = spin_from_canonical(self.spin_magnitudes[1], z.p[4], z.q[4]);
        [
            l[0] + s1[0] + s2[0],
            l[1] + s1[1] + s2[1],
            l[2] + s1[2] + s2[2],
        ]
    }
}

impl Hamiltonian<5> for PNBinary {
    fn eval<S: Real>(&self, pc: &[S; 5], qc: &[S; 5]) -> S {
        let eta = self.eta();
        let p = [pc[0], pc[1], pc[2]];
        let q = [qc[0], qc[1], qc[2]];
        let r = dot3(&q, &q).sqrt();
        let inv_r = S::one() / r;
        let inv_r2 = inv_r * inv_r;
        let inv_r3 = inv_r2 * inv_r;
        let n = [q[0] * inv_r, q[1] * inv_r, q[2] * inv_r];
        let p2 = dot3(&p, &p);
        let np = dot3(&n, &p);
        let c = |v: f64| S::from_f64(v);

        let mut h = S::zero();
        if self.terms.newtonian {
            h = h + c(0.5) * p2 - inv_r;
        }
        if self.terms.first_order {
            let kinetic = c(0.125 * (3.0 * eta - 1.0)) * p2 * p2;
            let potential = c(-0.5) * (c(3.0 + eta) * p2 + c(eta) * np * np) * inv_r;
            let contact = c(0.5) * inv_r2;
            h = h + c(self.c.powi(-2)) * (kinetic + potential + contact);
        }
        if self.terms.second_order {
            let p4 = p2 * p2;
            let np2 = np * np;
            let kinetic = c((1.0 - 5.0 * eta + 5.0 * eta * eta) / 16.0) * p4 * p2;
            let quartic = (c((5.0 - 20.0 * eta - 3.0 * eta * eta) / 8.0) * p4
                - c(2.0 * eta * eta / 8.0) * np2 * p2
                - c(3.0 * eta * eta / 8.0) * np2 * np2)
                * inv_r;
            let quadratic = (c(0.5 * (5.0 + 8.0 * eta)) * p2 + c(1.5 * eta) * np2) * inv_r2;
            let contact = c(-0.25 * (1.0 + 3.0 * eta)) * inv_r3;
            h = h + c(self.c.powi(-4)) * (kinetic + quartic + quadratic + contact);
        }
        if self.terms.spin_orbit || self.terms.spin_spin {
            let s1 = spin_from_canonical(self.spin_magnitudes[0], pc[3], qc[3]);
            let s2 = spin_from_canonical(self.spin_magnitudes[1], pc[4], qc[4]);
            if self.terms.spin_orbit {
                let l = cross3(&q, &p);
                let total = add3(&s1, &s2);
                let weighted = add3(&scale3(&s1, 1.0 / self.beta), &scale3(&s2, self.beta));
                let effective = add3(&scale3(&total, 2.0), &scale3(&weighted, 1.5));
                h = h + c(self.c.powi(-3)) * inv_r3 * dot3(&effective, &l);
            }
            if self.terms.spin_spin {
                let s0 = add3(
                    &scale3(&s1, 1.0 + 1.0 / self.beta),
                    &scale3(&s2, 1.0 + self.beta),
                );
                let s0n = dot3(&s0, &n);
                h = h
                    + c(self.c.powi(-4))
                        * c(0.5)
                        * inv_r3
                        * (c(3.0) * s0n * s0n - dot3(&s0, &s0));
            }
        }
        h
    }
}

/// Bundled initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryPreset {
    /// Wide, weakly relativistic orbit with a polar second spin; the motion
    /// stays regular over the tested horizons.
    Regular,
    /// Tight equal-mass orbit with strong PN terms; the motion is chaotic
    /// with a largest Lyapunov exponent near 1e-3.
    Chaotic,
}

impl TrajectoryPreset {
    pub fn problem(self) -> PNBinary {
        match self {
            TrajectoryPreset::Regular => {
                PNBinary::new(0.28, 10.0_f64.sqrt(), [0.0479, 0.6104])
            }
            TrajectoryPreset::Chaotic => PNBinary::new(1.0, 1.0, [0.25, 0.25]),
        }
    }

    pub fn initial_state(self) -> State<5> {
        match self {
            TrajectoryPreset::Regular => State::new(
                [0.0, 0.18, 0.0, 0.0445, 0.6104],
                [25.34, 0.0, 0.0, 1.2490, 0.6202],
            ),
            TrajectoryPreset::Chaotic => State::new(
                [0.0, 0.50, 0.0, -0.2459, -0.2459],
                [8.31, 0.0, 0.0, 0.7587, 0.8469],
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::grad;

    #[test]
    fn symmetric_mass_ratio_at_preset_values() {
        assert_eq!(TrajectoryPreset::Regular.problem().eta(), 0.1708984375);
        assert_eq!(TrajectoryPreset::Chaotic.problem().eta(), 0.25);
    }

    #[test]
    fn newtonian_part_matches_hand_value_at_tight_orbit_start() {
        // p^2/2 - 1/r = 0.125 - 1/8.31 at the chaotic preset.
        let mut problem = TrajectoryPreset::Chaotic.problem();
        problem.terms = PNTerms::newtonian_only();
        let z = TrajectoryPreset::Chaotic.initial_state();
        assert!((problem.value(&z) - 0.0046630565583634).abs() < 1e-15);
    }

    #[test]
    fn spin_vector_has_quoted_transverse_radius_and_fixed_norm() {
        let s = spin_from_canonical(0.0479, 0.0445, 1.2490);
        let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
        assert!((rho - 0.0177242).abs() < 1e-6);
        let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        assert!((norm - 0.0479).abs() < 1e-15);
    }

    #[test]
    fn spin_norm_equals_magnitude_across_the_canonical_chart() {
        for i in 0..50 {
            let xi = -0.24 + 0.01 * i as f64;
            let s = spin_from_canonical(0.25, xi, 0.3 + 0.1 * i as f64);
            let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
            assert!((norm - 0.25).abs() < 1e-14, "xi = {xi}");
        }
    }

    #[test]
    fn orbital_angular_momentum_at_wide_orbit_start() {
        // Q x P = (0, 0, 25.34 * 0.18).
        let problem = TrajectoryPreset::Regular.problem();
        let z = TrajectoryPreset::Regular.initial_state();
        let j = problem.total_angular_momentum(&z);
        let s1 = spin_from_canonical(0.0479, 0.0445, 1.2490);
        let s2 = spin_from_canonical(0.6104, 0.6104, 0.6202);
        assert!((j[2] - s1[2] - s2[2] - 4.5612).abs() < 1e-12);
        assert!((j[0] - s1[0] - s2[0]).abs() < 1e-15);
        assert!((j[1] - s1[1] - s2[1]).abs() < 1e-15);
    }

    #[test]
    fn polar_spin_component_decouples_its_azimuth() {
        // The second preset spin starts on the pole (xi = magnitude), where
        // the transverse radius vanishes; H must not depend on that azimuth
        // and the gradient must stay finite.
        let problem = TrajectoryPreset::Regular.problem();
        let z = TrajectoryPreset::Regular.initial_state();
        let g = grad(&problem, &z).unwrap();
        assert_eq!(g.dq[4], 0.0, "azimuth force on a polar spin");
        for k in 0..5 {
            assert!(g.dp[k].is_finite() && g.dq[k].is_finite());
        }
    }

    #[test]
    fn gradient_matches_central_differences_at_tight_orbit_start() {
        let problem = TrajectoryPreset::Chaotic.problem();
        let z = TrajectoryPreset::Chaotic.initial_state();
        let g = grad(&problem, &z).unwrap();
        let eps = 1e-6;
        for k in 0..5 {
            let mut zp = z;
            let mut zm = z;
            zp.p[k] += eps;
            zm.p[k] -= eps;
            let fd = (problem.value(&zp) - problem.value(&zm)) / (2.0 * eps);
            assert!((g.dp[k] - fd).abs() < 1e-7, "dH/dp[{k}]");
            let mut zp = z;
            let mut zm = z;
            zp.q[k] += eps;
            zm.q[k] -= eps;
            let fd = (problem.value(&zp) - problem.value(&zm)) / (2.0 * eps);
            assert!((g.dq[k] - fd).abs() < 1e-7, "dH/dq[{k}]");
        }
    }

    #[test]
    fn corrections_scale_with_their_inverse_light_speed_powers() {
        // Doubling c must scale the 1PN term by 1/4 and the spin-orbit term
        // by 1/8 at a fixed state.
        let z = TrajectoryPreset::Chaotic.initial_state();
        let term_value = |c: f64, terms: PNTerms| {
            let mut problem = PNBinary::new(1.0, c, [0.25, 0.25]);
            problem.terms = terms;
            problem.value(&z)
        };
        let only_1pn = PNTerms {
            newtonian: false,
            first_order: true,
            second_order: false,
            spin_orbit: false,
            spin_spin: false,
        };
        let only_so = PNTerms {
            newtonian: false,
            first_order: false,
            second_order: false,
            spin_orbit: true,
            spin_spin: false,
        };
        assert!((term_value(2.0, only_1pn) - term_value(1.0, only_1pn) / 4.0).abs() < 1e-15);
        assert!((term_value(2.0, only_so) - term_value(1.0, only_so) / 8.0).abs() < 1e-15);
    }
}
