//! Constructive symplectic matrix realizing a weighted projection target.
//!
//! For an extended state (p, x, q, y) and weight vectors (lambda, xi), the
//! builder returns a 4d x 4d matrix M with M^T J M = J exactly in exact
//! arithmetic and M (p, x, q, y)^T = (p~, p~, q~, q~)^T, where p~ and q~
//! are the componentwise weighted averages. Existence fails only on a
//! measure-zero set of weights: a component whose target (p~_k, q~_k) is
//! exactly (0, 0) while its coordinates are not all zero admits no such
//! matrix, and the builder reports it instead of failing silently.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use crate::error::Error;
use crate::phase::{component_target, ExtendedState, WeightVectors};

/// Which per-component construction produced a factor of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectionCase {
    /// Both the momentum pair (p_k, x_k) and the position pair (q_k, y_k)
    /// are nonzero; two symmetric shears move the component to its target.
    General,
    /// Momentum pair exactly zero; a block-diagonal (T^{-T}, T) factor
    /// moves the position pair.
    MomentumPairZero,
    /// Position pair exactly zero; a block-diagonal (T, T^{-T}) factor
    /// moves the momentum pair.
    PositionPairZero,
    /// All four coordinates zero; the factor is the identity.
    AllZero,
}

/// Result of [`symplectic_projection_matrix`]: the matrix together with the
/// per-component construction cases (useful for coverage accounting).
#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    /// The 4d x 4d matrix, coordinates ordered (p, x, q, y).
    pub matrix: DMatrix<f64>,
    /// Construction case for each component k.
    pub cases: Vec<ProjectionCase>,
}

impl ProjectionMatrix {
    /// Number of degrees of freedom d.
    pub fn dof(&self) -> usize {
        self.cases.len()
    }

    /// Apply the matrix to an extended state.
    pub fn map<const D: usize>(&self, e: &ExtendedState<D>) -> ExtendedState<D> {
        let v = flatten(e);
        let w = &self.matrix * v;
        unflatten(&w)
    }

    /// Largest absolute entry of M^T J M - J; zero for an exactly
    /// symplectic matrix.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        let j = standard_j(n / 2);
        let r = self.matrix.transpose() * &j * &self.matrix - &j;
        r.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// The canonical structure matrix for coordinates ((p, x), (q, y)):
/// J = [[0, I], [-I, 0]] with half-dimension `half`.
pub(crate) fn standard_j(half: usize) -> DMatrix<f64> {
    let n = 2 * half;
    let mut j = DMatrix::zeros(n, n);
    for i in 0..half {
        j[(i, half + i)] = 1.0;
        j[(half + i, i)] = -1.0;
    }
    j
}

fn flatten<const D: usize>(e: &ExtendedState<D>) -> DVector<f64> {
    let mut v = DVector::zeros(4 * D);
    for k in 0..D {
        v[k] = e.p[k];
        v[D + k] = e.x[k];
        v[2 * D + k] = e.q[k];
        v[3 * D + k] = e.y[k];
    }
    v
}

fn unflatten<const D: usize>(v: &DVector<f64>) -> ExtendedState<D> {
    let mut e = ExtendedState::new([0.0; D], [0.0; D], [0.0; D], [0.0; D]);
    for k in 0..D {
        e.p[k] = v[k];
        e.x[k] = v[D + k];
        e.q[k] = v[2 * D + k];
        e.y[k] = v[3 * D + k];
    }
    e
}

/// Inverse transpose of a 2x2 matrix.
fn inv_t(t: Matrix2<f64>) -> Matrix2<f64> {
    let det = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
    Matrix2::new(
        t[(1, 1)] / det,
        -t[(1, 0)] / det,
        -t[(0, 1)] / det,
        t[(0, 0)] / det,
    )
}

/// Shear adding s * (position pair) to the momentum pair; symplectic for
/// symmetric s.
fn upper_shear(s: Matrix2<f64>) -> Matrix4<f64> {
    let mut u = Matrix4::identity();
    u.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
    u
}

/// Shear adding t * (momentum pair) to the position pair; symplectic for
/// symmetric t.
fn lower_shear(t: Matrix2<f64>) -> Matrix4<f64> {
    let mut v = Matrix4::identity();
    v.fixed_view_mut::<2, 2>(2, 0).copy_from(&t);
    v
}

fn block_diag(a: Matrix2<f64>, b: Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    m
}

/// Solve the nonsymmetric 2x2 system t * (u, v)^T = (w, w)^T with the free
/// parameters fixed so that t is nonsingular: (b, d) = (0, 1) when dividing
/// by u, else (a, c) = (0, 1). Either choice solves the system exactly; the
/// larger pivot keeps the entries small.
fn pair_collapse(u: f64, v: f64, w: f64) -> Matrix2<f64> {
    if u.abs() >= v.abs() {
        Matrix2::new(w / u, 0.0, (w - v) / u, 1.0)
    } else {
        Matrix2::new(0.0, w / v, 1.0, (w - u) / v)
    }
}

/// Build the per-component 4x4 factor, or report infeasibility.
fn component_factor(
    k: usize,
    p: f64,
    x: f64,
    q: f64,
    y: f64,
    pt: f64,
    qt: f64,
) -> Result<(Matrix4<f64>, ProjectionCase), Error> {
    let p_pair_zero = p == 0.0 && x == 0.0;
    let q_pair_zero = q == 0.0 && y == 0.0;
    match (p_pair_zero, q_pair_zero) {
        (true, true) => Ok((Matrix4::identity(), ProjectionCase::AllZero)),
        (true, false) => {
            // Momentum pair zero, so p~ is automatically zero; the target is
            // feasible only when q~ is nonzero.
            if qt == 0.0 {
                return Err(Error::InfeasibleWeights { component: k });
            }
            let t = pair_collapse(q, y, qt);
            Ok((
                block_diag(inv_t(t), t),
                ProjectionCase::MomentumPairZero,
            ))
        }
        (false, true) => {
            if pt == 0.0 {
                return Err(Error::InfeasibleWeights { component: k });
            }
            let t = pair_collapse(p, x, pt);
            Ok((
                block_diag(t, inv_t(t)),
                ProjectionCase::PositionPairZero,
            ))
        }
        (false, false) => {
            // Both shear orders solve the system exactly; divisors are q~
            // (position-first order) or p~ (mirrored order), so take the
            // larger one for numerical headroom. A target of exactly (0, 0)
            // on a nonzero component is unreachable by any symplectic map.
            let (dp, dx, dq, dy) = (pt - p, pt - x, qt - q, qt - y);
            if pt == 0.0 && qt == 0.0 {
                Err(Error::InfeasibleWeights { component: k })
            } else if qt.abs() >= pt.abs() {
                // Lower shear first: symmetric t0 = [[d, e], [e, f]] sends
                // the position pair to (q~, q~) using (p, x); free parameter
                // (f when pivoting on p, else d) set to zero.
                let t0 = if p.abs() >= x.abs() {
                    let f = 0.0;
                    let e = (dy - f * x) / p;
                    let d = (dq - e * x) / p;
                    Matrix2::new(d, e, e, f)
                } else {
                    let d = 0.0;
                    let e = (dq - d * p) / x;
                    let f = (dy - e * p) / x;
                    Matrix2::new(d, e, e, f)
                };
                // Upper shear second: symmetric s0 = [[a, b], [b, c]] sends
                // the momentum pair to (p~, p~) using (q~, q~); a = 0.
                let a = 0.0;
                let b = dp / qt - a;
                let c = dx / qt - b;
                let s0 = Matrix2::new(a, b, b, c);
                Ok((upper_shear(s0) * lower_shear(t0), ProjectionCase::General))
            } else {
                // Mirrored order: upper shear first (momentum pair to
                // (p~, p~) using (q, y)), then lower shear (position pair to
                // (q~, q~) using (p~, p~)).
                let s0 = if q.abs() >= y.abs() {
                    let c = 0.0;
                    let b = dx / q;
                    let a = (dp - b * y) / q;
                    Matrix2::new(a, b, b, c)
                } else {
                    let a = 0.0;
                    let b = dp / y;
                    let c = (dx - b * q) / y;
                    Matrix2::new(a, b, b, c)
                };
                let e = 0.0;
                let d = dq / pt;
                let f = dy / pt;
                let t0 = Matrix2::new(d, e, e, f);
                Ok((lower_shear(t0) * upper_shear(s0), ProjectionCase::General))
            }
        }
    }
}

/// Build the symplectic matrix mapping an extended state to its weighted
/// projection target (p~, p~, q~, q~).
///
/// Feasibility is checked at call time: for each component k the target
/// (p~_k, q~_k) must not be exactly (0, 0) unless p_k = x_k = q_k = y_k = 0.
/// Weight pairs hitting that set are rejected with
/// [`Error::InfeasibleWeights`] naming the component.
pub fn symplectic_projection_matrix<const D: usize>(
    e: &ExtendedState<D>,
    w: &WeightVectors<D>,
) -> Result<ProjectionMatrix, Error> {
    let n = 4 * D;
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut cases = Vec::with_capacity(D);
    for k in 0..D {
        let (pt, qt) = component_target(e, w, k);
        let (local, case) = component_factor(k, e.p[k], e.x[k], e.q[k], e.y[k], pt, qt)?;
        cases.push(case);
        // Each factor touches only the four coordinates of component k, so
        // the product of the factors is assembled by direct block writes.
        let idx = [k, D + k, 2 * D + k, 3 * D + k];
        for (i, &ri) in idx.iter().enumerate() {
            for (j, &cj) in idx.iter().enumerate() {
                m[(ri, cj)] = local[(i, j)];
            }
        }
    }
    Ok(ProjectionMatrix { matrix: m, cases })
}
