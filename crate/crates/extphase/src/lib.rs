//! Geometric integrators for nonseparable Hamiltonian systems.
//!
//! A nonseparable Hamiltonian H(p, q) admits no explicit splitting in the
//! original phase space. Doubling the variables to (p, x, q, y) makes the
//! extended Hamiltonian Gamma = H(p, y) + H(x, q) splittable into two parts
//! whose exact flows are explicit, because each part depends on one set of
//! momenta and the other set of positions. Composing those flows and then
//! projecting back onto the diagonal submanifold N = {(p, p, q, q)} with a
//! symplectic weighted average yields explicit symplectic one-step maps for
//! the original system.
//!
//! The crate provides:
//! - [`autodiff`]: scalar forward-mode dual numbers, so Hamiltonians written
//!   once yield exact partial derivatives.
//! - [`phase`]: state types, the embedding into extended phase space, the
//!   projection maps, and the constructive symplectic matrix that realizes a
//!   weighted projection target.
//! - [`flows`]: the exactly solvable extended-space sub-flows, including the
//!   rotational mixing flow.
//! - [`integrators`]: splitting compositions, the explicit projection
//!   integrators, raw extended-space runs, a semiexplicit symmetric
//!   projection method, and implicit symplectic baselines.
//! - [`problems`]: two bundled benchmark systems (a 1-dof nonseparable
//!   oscillator and a post-Newtonian spinning binary) plus cross-validated
//!   reference solutions.
//! - [`diagnostics`]: error and conservation metrics, numerical
//!   symplecticity checks, Lyapunov exponents, Poincare sections, and
//!   growth-law fitting.

pub mod autodiff;
pub mod diagnostics;
pub mod error;
pub mod flows;
pub mod integrators;
pub mod phase;
pub mod problems;

pub use autodiff::{grad, Dual, Gradient, Real};
pub use diagnostics::{
    energy_error, fit_growth, global_error, lyapunov_exponent, max_in_window, poincare_section,
    symplecticity_defect, Channel, Crossing, GrowthFit, RunMeta, RunRecord, Sample,
};
pub use error::Error;
pub use flows::{flow_a, flow_b, flow_c, Hamiltonian, MixingStrength};
pub use integrators::{
    default_factors, euler_step, exp_symp_step, gauss4_step, implicit_midpoint_step, integrate,
    midpoint_permutation, pihajoki_step, semiexplicit_step, strang_extended, tao_run_step,
    tao_strang, triple_jump_coefficients, triple_jump_strang, weighted_projection_step, yoshida4,
    Family,
    IntegratorSpec, Mixing, ObserverHooks, Order, StepResult, Stepper, WeightPolicy,
};
pub use phase::{
    discrepancy, embed, project_double_factor, project_single_factor, project_weighted,
    symplectic_projection_matrix, ExtendedState, FactorPair, ProjectionCase, ProjectionMatrix,
    ProjectionMode, State, WeightVectors,
};
pub use problems::{
    reference_solution, spin_from_canonical, Integrable1D, PNBinary, PNTerms, Reference,
    TrajectoryPreset,
};
