//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by evaluations, solvers, and analyses.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A gradient pass produced a non-finite value or derivative.
    /// `index` is the offending coordinate in (p_0..p_{d-1}, q_0..q_{d-1}) order.
    #[error("non-finite value in gradient pass for coordinate {index}")]
    NonFinite { index: usize },

    /// A Hamiltonian was evaluated outside its domain (for example r = 0
    /// in the two-body problem).
    #[error("domain error: {reason}")]
    Domain { reason: String },

    /// Canonical spin coordinates left the sphere: |xi| exceeds the spin
    /// magnitude Lambda for spin `index` (0-based).
    #[error("spin {index} out of domain: |xi| = {xi_abs} exceeds Lambda = {lambda}")]
    SpinDomain {
        index: usize,
        xi_abs: f64,
        lambda: f64,
    },

    /// The weighted projection target for component `component` is (0, 0)
    /// while the underlying extended coordinates are not all zero, so no
    /// symplectic matrix with that target exists.
    #[error("weights infeasible for this state (component {component})")]
    InfeasibleWeights { component: usize },

    /// Weight vectors violate the selected projection mode's invariant.
    #[error("invalid weights: {reason}")]
    InvalidWeights { reason: String },

    /// An iterative solve did not reach its tolerance.
    #[error("non-convergence after {iterations} iterations, residual {residual:.3e}")]
    NonConvergence { iterations: usize, residual: f64 },

    /// An integrator spec is internally inconsistent.
    #[error("invalid integrator spec: {reason}")]
    InvalidSpec { reason: String },

    /// A run aborted at step `step` (1-based) with the underlying error.
    #[error("run aborted at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// Cross-validation of a reference solution disagreed beyond the gate;
    /// `t` is the first sample time where agreement failed.
    #[error("reference unreliable from t = {t}: cross-validation disagreement {disagreement:.3e}")]
    ReferenceUnreliable { t: f64, disagreement: f64 },

    /// A growth fit had too few usable samples in the window.
    #[error("growth fit failed: {reason}")]
    FitError { reason: String },
}

impl Error {
    /// The step index attached to a run abort, if any.
    pub fn failing_step(&self) -> Option<usize> {
        match self {
            Error::StepFailed { step, .. } => Some(*step),
            _ => None,
        }
    }
}
