//! Time-stepping methods and the run driver.
//!
//! The method roster covers three groups:
//! - explicit projection integrators (the crate's core): an extended-space
//!   splitting step followed by a symplectic projection back onto the
//!   diagonal submanifold;
//! - raw extended-space runs (no re-embedding), with or without mixing,
//!   kept for contrast experiments;
//! - baselines: implicit midpoint, 2-stage Gauss collocation, a
//!   semiexplicit symmetric projection method, and a non-symplectic
//!   explicit Euler control.

pub(crate) mod implicit;
mod projection_methods;
mod semiexplicit;
mod splitting;

pub use implicit::{euler_step, gauss4_step, implicit_midpoint_step};
pub use projection_methods::{
    exp_symp_step, midpoint_permutation, pihajoki_step, tao_run_step, weighted_projection_step,
};
pub use semiexplicit::semiexplicit_step;
pub use splitting::{
    strang_extended, tao_strang, triple_jump_coefficients, triple_jump_strang, yoshida4,
};

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::diagnostics::{global_error, RunMeta, RunRecord, Sample};
use crate::error::Error;
use crate::flows::{Hamiltonian, MixingStrength};
use crate::phase::{discrepancy, embed, ExtendedState, FactorPair, State, WeightVectors};

/// Method family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Explicit projection integrator with the alternating two-factor
    /// weighted average.
    ExpSymp,
    /// Explicit projection integrator with per-component weight vectors
    /// (standard mode) under a [`WeightPolicy`].
    WeightedProjection,
    /// Raw extended-space run, no mixing, no re-embedding.
    Pihajoki,
    /// Raw extended-space run with the midpoint permutation after each step.
    PihajokiMidmix,
    /// Raw extended-space run of the five-stage composition with rotational
    /// binding.
    Tao,
    /// Symmetric-projection method solved per step (quasi-Newton).
    Semiexplicit,
    /// Implicit midpoint rule (order 2), fixed-point solve.
    ImplicitMidpoint,
    /// Two-stage Gauss collocation (order 4), fixed-point solve.
    Gauss4,
    /// Explicit Euler, first order, not symplectic; control method only.
    Euler,
}

/// Composition order of the underlying one-step map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Two,
    Four,
}

/// How the weighted-projection family chooses its weights each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightPolicy {
    /// The configured weight vectors at every step.
    Constant,
    /// Swap the roles of lambda and xi on even steps (step 1 is odd).
    Alternating,
    /// Draw fresh lambda_k, xi_k ~ U[0, 1) per component each step from a
    /// seeded stream (all lambda components first, then all xi).
    FreshRandomPerStep,
}

/// Optional post-step mixing for raw extended-space runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mixing {
    None,
    MidpointPermutation,
}

/// Full description of a method instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSpec<const D: usize> {
    pub family: Family,
    pub order: Order,
    /// Scalar factor pair for [`Family::ExpSymp`].
    pub factors: FactorPair,
    /// Weight vectors for [`Family::WeightedProjection`].
    pub weights: WeightVectors<D>,
    pub weight_policy: WeightPolicy,
    /// Binding strength for [`Family::Tao`].
    pub omega: MixingStrength,
    /// Convergence tolerance for the iterative families.
    pub tol: f64,
    /// Iteration cap for the iterative families.
    pub max_iters: usize,
    /// Seed for the random weight policy.
    pub rng_seed: u64,
}

impl<const D: usize> IntegratorSpec<D> {
    /// A spec with the bundled defaults: factor pair (1/e, 1/pi), neutral
    /// weights, omega = 1, tol = 1e-13, iteration cap 500.
    pub fn new(family: Family, order: Order) -> Self {
        IntegratorSpec {
            family,
            order,
            factors: default_factors(),
            weights: WeightVectors::splat(0.5, 0.5),
            weight_policy: WeightPolicy::Constant,
            omega: MixingStrength(1.0),
            tol: 1e-13,
            max_iters: 500,
            rng_seed: 0,
        }
    }

    pub fn with_factors(mut self, factors: FactorPair) -> Self {
        self.factors = factors;
        self
    }

    pub fn with_weights(mut self, weights: WeightVectors<D>, policy: WeightPolicy) -> Self {
        self.weights = weights;
        self.weight_policy = policy;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = MixingStrength(omega);
        self
    }

    pub fn with_tolerance(mut self, tol: f64, max_iters: usize) -> Self {
        self.tol = tol;
        self.max_iters = max_iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Check internal consistency; every run driver calls this first.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec {
                reason: format!("tol must be positive, got {}", self.tol),
            });
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidSpec {
                reason: "max_iters must be at least 1".into(),
            });
        }
        match (self.family, self.order) {
            (Family::Gauss4, Order::Two) => Err(Error::InvalidSpec {
                reason: "the Gauss collocation family is fourth order; use order 4".into(),
            }),
            (Family::ImplicitMidpoint, Order::Four) => Err(Error::InvalidSpec {
                reason: "the implicit midpoint family is second order; use order 2".into(),
            }),
            (Family::Euler, Order::Four) => Err(Error::InvalidSpec {
                reason: "the Euler control is first order; spell it with order 2".into(),
            }),
            _ => Ok(()),
        }
    }
}

/// The bundled default factor pair (1/e, 1/pi).
pub fn default_factors() -> FactorPair {
    FactorPair::new(std::f64::consts::E.recip(), std::f64::consts::FRAC_1_PI)
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy)]
pub struct StepResult<const D: usize> {
    /// The on-manifold state after the step (for raw extended families,
    /// the primary copy).
    pub state: State<D>,
    /// The extended state before projection (projection families), the
    /// current raw extended state (raw families), or the embedded result
    /// (implicit families).
    pub extended: ExtendedState<D>,
    /// Iterations spent by an iterative solve; 0 for purely explicit steps.
    pub iterations_used: usize,
    /// Distance of `extended` from the diagonal submanifold before any
    /// projection was applied.
    pub discrepancy_pre_projection: f64,
}

/// Stateful one-step driver: owns the current state, the step parity used
/// by alternating projections, and the random weight stream.
pub struct Stepper<'a, const D: usize, H: Hamiltonian<D>> {
    ham: &'a H,
    spec: IntegratorSpec<D>,
    h: f64,
    completed: u64,
    rng: ChaCha12Rng,
    extended: ExtendedState<D>,
}

impl<'a, const D: usize, H: Hamiltonian<D>> Stepper<'a, D, H> {
    pub fn new(
        ham: &'a H,
        s0: State<D>,
        spec: IntegratorSpec<D>,
        h: f64,
    ) -> Result<Self, Error> {
        spec.validate()?;
        Ok(Stepper {
            ham,
            spec,
            h,
            completed: 0,
            rng: ChaCha12Rng::seed_from_u64(spec.rng_seed),
            extended: embed(&s0),
        })
    }

    /// The current on-manifold state (primary copy for raw families).
    pub fn state(&self) -> State<D> {
        self.extended.primary()
    }

    /// The current extended state; equal to the embedding of [`state`](Self::state)
    /// for every family except the raw extended ones.
    pub fn extended(&self) -> ExtendedState<D> {
        self.extended
    }

    /// Number of completed steps.
    pub fn completed(&self) -> u64 {
        self.completed
    }

    /// Reset the current state (re-embedding it), e.g. after a trajectory
    /// renormalization. The step parity and random stream continue.
    pub fn set_state(&mut self, s: State<D>) {
        self.extended = embed(&s);
    }

    /// Advance by one step of size h.
    pub fn step(&mut self) -> Result<StepResult<D>, Error> {
        let n = self.completed + 1;
        let ham = self.ham;
        let h = self.h;
        let order = self.spec.order;
        let current = self.extended;
        let result = match self.spec.family {
            Family::ExpSymp => {
                exp_symp_step(ham, &current.primary(), h, order, self.spec.factors, n)?
            }
            Family::WeightedProjection => {
                let w = self.step_weights(n);
                weighted_projection_step(ham, &current.primary(), h, order, &w)?
            }
            Family::Pihajoki | Family::PihajokiMidmix => {
                let base = |e: &ExtendedState<D>, hh: f64| strang_extended(ham, e, hh);
                let mut e = match order {
                    Order::Two => base(&current, h)?,
                    Order::Four => yoshida4(base, &current, h)?,
                };
                let delta = discrepancy(&e);
                if self.spec.family == Family::PihajokiMidmix {
                    e = midpoint_permutation(&e);
                }
                StepResult {
                    state: e.primary(),
                    extended: e,
                    iterations_used: 0,
                    discrepancy_pre_projection: delta,
                }
            }
            Family::Tao => {
                let omega = self.spec.omega;
                let base = |e: &ExtendedState<D>, hh: f64| tao_strang(ham, e, omega, hh);
                let e = match order {
                    Order::Two => base(&current, h)?,
                    Order::Four => yoshida4(base, &current, h)?,
                };
                StepResult {
                    state: e.primary(),
                    extended: e,
                    iterations_used: 0,
                    discrepancy_pre_projection: discrepancy(&e),
                }
            }
            Family::Semiexplicit => semiexplicit_step(
                ham,
                &current.primary(),
                h,
                order,
                self.spec.tol,
                self.spec.max_iters,
            )?,
            Family::ImplicitMidpoint => implicit_midpoint_step(
                ham,
                &current.primary(),
                h,
                self.spec.tol,
                self.spec.max_iters,
            )?,
            Family::Gauss4 => gauss4_step(
                ham,
                &current.primary(),
                h,
                self.spec.tol,
                self.spec.max_iters,
            )?,
            Family::Euler => euler_step(ham, &current.primary(), h)?,
        };
        self.extended = match self.spec.family {
            Family::Pihajoki | Family::PihajokiMidmix | Family::Tao => result.extended,
            _ => embed(&result.state),
        };
        self.completed = n;
        Ok(result)
    }

    fn step_weights(&mut self, step_index: u64) -> WeightVectors<D> {
        match self.spec.weight_policy {
            WeightPolicy::Constant => self.spec.weights,
            WeightPolicy::Alternating => {
                if step_index % 2 == 1 {
                    self.spec.weights
                } else {
                    WeightVectors::new(self.spec.weights.xi, self.spec.weights.lambda)
                }
            }
            WeightPolicy::FreshRandomPerStep => {
                let mut lambda = [0.0; D];
                let mut xi = [0.0; D];
                for v in lambda.iter_mut() {
                    *v = self.rng.gen();
                }
                for v in xi.iter_mut() {
                    *v = self.rng.gen();
                }
                WeightVectors::new(lambda, xi)
            }
        }
    }
}

/// Observation points for [`integrate`]. Defaults: sample every step, no
/// reference, no invariant monitor, no extended-state callback.
pub struct ObserverHooks<'a, const D: usize> {
    /// Record a sample every this many steps (at least 1).
    pub sample_stride: usize,
    /// Reference states aligned with the recorded samples: element j is the
    /// exact state at t = (j + 1) * sample_stride * h. Without a reference
    /// the GE channel is NaN.
    pub reference: Option<&'a [State<D>]>,
    /// Conserved-vector monitor; samples store the componentwise drift from
    /// its value at the initial state.
    pub invariant: Option<&'a dyn Fn(&State<D>) -> [f64; 3]>,
    /// Called at t = 0 with the initial embedding and after every step with
    /// the step's extended state (pre-projection for projection families).
    pub extended_sample: Option<&'a mut (dyn FnMut(f64, &ExtendedState<D>) + 'a)>,
}

impl<const D: usize> Default for ObserverHooks<'_, D> {
    fn default() -> Self {
        ObserverHooks {
            sample_stride: 1,
            reference: None,
            invariant: None,
            extended_sample: None,
        }
    }
}

/// Run `n_steps` steps of size h from `s0`, recording diagnostic samples.
///
/// Deterministic for a fixed spec (including seed). A step failure aborts
/// the run with the 1-based step index attached.
pub fn integrate<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    spec: &IntegratorSpec<D>,
    h: f64,
    n_steps: usize,
    hooks: &mut ObserverHooks<'_, D>,
) -> Result<RunRecord, Error> {
    if n_steps == 0 {
        return Err(Error::InvalidSpec {
            reason: "n_steps must be at least 1".into(),
        });
    }
    let stride = hooks.sample_stride.max(1);
    let started = Instant::now();
    let mut stepper = Stepper::new(ham, *s0, *spec, h)?;
    let energy0 = ham.value(s0);
    let invariant0 = hooks.invariant.map(|f| f(s0));
    if let Some(cb) = hooks.extended_sample.as_mut() {
        cb(0.0, &stepper.extended());
    }
    let mut samples = Vec::with_capacity(n_steps / stride);
    let mut sample_idx = 0usize;
    for n in 1..=n_steps {
        let r = stepper.step().map_err(|e| Error::StepFailed {
            step: n,
            source: Box::new(e),
        })?;
        let t = n as f64 * h;
        if let Some(cb) = hooks.extended_sample.as_mut() {
            cb(t, &r.extended);
        }
        if n % stride == 0 {
            let s = stepper.state();
            let ge = match hooks.reference {
                Some(reference) => {
                    let rs = reference.get(sample_idx).ok_or_else(|| Error::InvalidSpec {
                        reason: format!(
                            "reference provides {} states but sample {} was requested",
                            reference.len(),
                            sample_idx + 1
                        ),
                    })?;
                    global_error(&s, rs)
                }
                None => f64::NAN,
            };
            let ghe = (ham.value(&s) - energy0).abs();
            let j_drift = match (hooks.invariant, invariant0) {
                (Some(f), Some(v0)) => {
                    let v = f(&s);
                    Some([v[0] - v0[0], v[1] - v0[1], v[2] - v0[2]])
                }
                _ => None,
            };
            samples.push(Sample {
                t,
                ge,
                ghe,
                delta: r.discrepancy_pre_projection,
                j_drift,
            });
            sample_idx += 1;
        }
    }
    Ok(RunRecord {
        meta: RunMeta {
            method: String::new(),
            problem: String::new(),
            h,
            seed: spec.rng_seed,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
        samples,
    })
}
