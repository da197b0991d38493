//! Phase-space state types, the extended-space embedding, and the
//! projection maps that return extended states to the diagonal
//! submanifold N = {(p, p, q, q)}.

pub(crate) mod matrix;

pub use matrix::{symplectic_projection_matrix, ProjectionCase, ProjectionMatrix};

use crate::error::Error;

/// A point (p, q) in the original 2d-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<const D: usize> {
    /// Generalized momenta.
    pub p: [f64; D],
    /// Generalized positions conjugate to `p`.
    pub q: [f64; D],
}

impl<const D: usize> State<D> {
    pub fn new(p: [f64; D], q: [f64; D]) -> Self {
        State { p, q }
    }

    /// Number of flat coordinates (2d), ordered p then q.
    pub const FLAT_DIM: usize = 2 * D;

    /// Flat coordinate accessor, index in 0..2d with p first.
    pub fn coord(&self, i: usize) -> f64 {
        if i < D {
            self.p[i]
        } else {
            self.q[i - D]
        }
    }

    /// Flat coordinate mutator, same ordering as [`State::coord`].
    pub fn set_coord(&mut self, i: usize, v: f64) {
        if i < D {
            self.p[i] = v;
        } else {
            self.q[i - D] = v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.q.iter()).all(|v| v.is_finite())
    }
}

/// A point (p, x, q, y) in the 4d-dimensional extended phase space.
///
/// Conjugate pairing is (p, q) and (x, y); the extended Hamiltonian
/// couples (p, y) and (x, q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedState<const D: usize> {
    pub p: [f64; D],
    pub x: [f64; D],
    pub q: [f64; D],
    pub y: [f64; D],
}

impl<const D: usize> ExtendedState<D> {
    pub fn new(p: [f64; D], x: [f64; D], q: [f64; D], y: [f64; D]) -> Self {
        ExtendedState { p, x, q, y }
    }

    /// The first solution copy (p, q).
    pub fn primary(&self) -> State<D> {
        State::new(self.p, self.q)
    }

    /// The second solution copy (x, y).
    pub fn secondary(&self) -> State<D> {
        State::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.p
            .iter()
            .chain(self.x.iter())
            .chain(self.q.iter())
            .chain(self.y.iter())
            .all(|v| v.is_finite())
    }
}

/// Per-component projection weights lambda (momenta) and xi (positions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVectors<const D: usize> {
    pub lambda: [f64; D],
    pub xi: [f64; D],
}

impl<const D: usize> WeightVectors<D> {
    pub fn new(lambda: [f64; D], xi: [f64; D]) -> Self {
        WeightVectors { lambda, xi }
    }

    /// Uniform weights: every component gets the same (lambda, xi).
    pub fn splat(lambda: f64, xi: f64) -> Self {
        WeightVectors {
            lambda: [lambda; D],
            xi: [xi; D],
        }
    }

    /// The pair-fallback projection mode requires each lambda_k, xi_k in the
    /// open interval (0, 1) with lambda_k != xi_k.
    pub fn validate_pair_fallback(&self) -> Result<(), Error> {
        for k in 0..D {
            let (l, x) = (self.lambda[k], self.xi[k]);
            if !(l > 0.0 && l < 1.0 && x > 0.0 && x < 1.0) {
                return Err(Error::InvalidWeights {
                    reason: format!(
                        "component {k}: lambda = {l}, xi = {x} must lie in the open interval (0, 1)"
                    ),
                });
            }
            if l == x {
                return Err(Error::InvalidWeights {
                    reason: format!("component {k}: lambda and xi must differ, both are {l}"),
                });
            }
        }
        Ok(())
    }
}

/// A scalar weight pair (lambda0, mu0) for the single- and double-factor
/// integrators. Conventionally both lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorPair {
    pub lambda0: f64,
    pub mu0: f64,
}

impl FactorPair {
    pub fn new(lambda0: f64, mu0: f64) -> Self {
        FactorPair { lambda0, mu0 }
    }
}

/// How [`project_weighted`] combines the two solution copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Componentwise p_k = lambda_k p~ + (1 - lambda_k) x~ and
    /// q_k = xi_k q~ + (1 - xi_k) y~ (independent weights per channel).
    Standard,
    /// Componentwise, form the candidate pair (P, Q) entirely from lambda_k
    /// and the alternative (P~, Q~) entirely from xi_k; select (P, Q) unless
    /// it is exactly (0, 0), then fall back to (P~, Q~). Requires weights in
    /// (0, 1) with lambda_k != xi_k.
    PairFallback,
}

/// Embed a state on the diagonal submanifold: (p, q) -> (p, p, q, q).
pub fn embed<const D: usize>(s: &State<D>) -> ExtendedState<D> {
    ExtendedState::new(s.p, s.p, s.q, s.q)
}

/// Distance of an extended state from the diagonal submanifold:
/// the two-norm of (p - x, q - y). Zero exactly on the submanifold.
pub fn discrepancy<const D: usize>(e: &ExtendedState<D>) -> f64 {
    let mut acc = 0.0;
    for k in 0..D {
        let dp = e.p[k] - e.x[k];
        let dq = e.q[k] - e.y[k];
        acc += dp * dp + dq * dq;
    }
    acc.sqrt()
}

/// Weighted average of the two copies with a single scalar factor:
/// p = lambda0 p~ + (1 - lambda0) x~ and q = lambda0 q~ + (1 - lambda0) y~.
pub fn project_single_factor<const D: usize>(e: &ExtendedState<D>, f: FactorPair) -> State<D> {
    let l = f.lambda0;
    let mut s = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        s.p[k] = l * e.p[k] + (1.0 - l) * e.x[k];
        s.q[k] = l * e.q[k] + (1.0 - l) * e.y[k];
    }
    s
}

/// Alternating two-factor weighted average. On odd steps p uses lambda0 and
/// q uses mu0; on even steps the roles swap. The first integration step has
/// `step_index` 1 and is odd; this parity convention is fixed and relied on
/// by the alternating-step error cancellation.
pub fn project_double_factor<const D: usize>(
    e: &ExtendedState<D>,
    f: FactorPair,
    step_index: u64,
) -> State<D> {
    let odd = step_index % 2 == 1;
    let (wp, wq) = if odd {
        (f.lambda0, f.mu0)
    } else {
        (f.mu0, f.lambda0)
    };
    let mut s = State::new([0.0; D], [0.0; D]);
    for k in 0..D {
        s.p[k] = wp * e.p[k] + (1.0 - wp) * e.x[k];
        s.q[k] = wq * e.q[k] + (1.0 - wq) * e.y[k];
    }
    s
}

/// Weighted average of the two copies with per-component weight vectors.
/// See [`ProjectionMode`] for the two combination rules.
pub fn project_weighted<const D: usize>(
    e: &ExtendedState<D>,
    w: &WeightVectors<D>,
    mode: ProjectionMode,
) -> Result<State<D>, Error> {
    let mut s = State::new([0.0; D], [0.0; D]);
    match mode {
        ProjectionMode::Standard => {
            for k in 0..D {
                let (l, x) = (w.lambda[k], w.xi[k]);
                s.p[k] = l * e.p[k] + (1.0 - l) * e.x[k];
                s.q[k] = x * e.q[k] + (1.0 - x) * e.y[k];
            }
        }
        ProjectionMode::PairFallback => {
            w.validate_pair_fallback()?;
            for k in 0..D {
                let l = w.lambda[k];
                let cp = l * e.p[k] + (1.0 - l) * e.x[k];
                let cq = l * e.q[k] + (1.0 - l) * e.y[k];
                if cp * cp + cq * cq != 0.0 {
                    s.p[k] = cp;
                    s.q[k] = cq;
                } else {
                    let x = w.xi[k];
                    s.p[k] = x * e.p[k] + (1.0 - x) * e.x[k];
                    s.q[k] = x * e.q[k] + (1.0 - x) * e.y[k];
                }
            }
        }
    }
    Ok(s)
}

/// The projection target of [`project_weighted`] in standard mode for one
/// component: (p~_k, q~_k).
pub(crate) fn component_target<const D: usize>(
    e: &ExtendedState<D>,
    w: &WeightVectors<D>,
    k: usize,
) -> (f64, f64) {
    let (l, x) = (w.lambda[k], w.xi[k]);
    (
        l * e.p[k] + (1.0 - l) * e.x[k],
        x * e.q[k] + (1.0 - x) * e.y[k],
    )
}
