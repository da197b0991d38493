//! Cross-validated high-accuracy reference trajectories.
//!
//! References are produced by the fourth-order Gauss collocation method at
//! a small internal step, checked against a companion run at half that
//! step. Samples where the two runs disagree beyond the caller's tolerance
//! make the reference unreliable, which is reported as an error instead of
//! being returned as data.

use crate::diagnostics::global_error;
use crate::error::Error;
use crate::flows::Hamiltonian;
use crate::integrators::implicit::gauss4_increment;
use crate::phase::State;

/// A marched state with Kahan compensation per component. Reference runs
/// take millions of steps whose per-step displacements are thousands of
/// times smaller than the state, and plain accumulation at the state's
/// ulp picks up orbit-correlated rounding bias large enough to breach
/// tight self-agreement gates. Re-adding the lost low bits on every
/// update removes that bias.
struct Compensated<const D: usize> {
    z: State<D>,
    low: State<D>,
}

impl<const D: usize> Compensated<D> {
    fn new(z: State<D>) -> Self {
        Compensated {
            z,
            low: State::new([0.0; D], [0.0; D]),
        }
    }

    fn advance<H: Hamiltonian<D>>(
        &mut self,
        ham: &H,
        h: f64,
        tol: f64,
        max_iters: usize,
    ) -> Result<(), Error> {
        let (dz, _) = gauss4_increment(ham, &self.z, h, tol, max_iters)?;
        for k in 0..D {
            let y = dz.p[k] - self.low.p[k];
            let t = self.z.p[k] + y;
            self.low.p[k] = (t - self.z.p[k]) - y;
            self.z.p[k] = t;
            let y = dz.q[k] - self.low.q[k];
            let t = self.z.q[k] + y;
            self.low.q[k] = (t - self.z.q[k]) - y;
            self.z.q[k] = t;
        }
        Ok(())
    }
}

/// A validated reference trajectory on a uniform sample grid.
#[derive(Debug, Clone)]
pub struct Reference<const D: usize> {
    /// states[j] is the reference state at t = j * sample_dt; index 0 is
    /// the initial state.
    pub states: Vec<State<D>>,
    /// Spacing of the sample grid.
    pub sample_dt: f64,
    /// Largest observed disagreement between the two internal runs.
    pub max_disagreement: f64,
}

impl<const D: usize> Reference<D> {
    /// The post-initial samples, aligned with a run that records every
    /// sample_dt: element j is the state at t = (j + 1) * sample_dt.
    pub fn samples(&self) -> &[State<D>] {
        &self.states[1..]
    }
}

/// Integrate a cross-validated reference from `s0`.
///
/// Runs the Gauss method at internal steps `h_ref` and `h_ref / 2` in
/// lockstep and records the finer run at every multiple of `sample_dt`,
/// up to t = n_samples * sample_dt. Any sample where the two runs differ
/// by more than `agreement_tol` aborts with the sample time and the
/// observed disagreement. `sample_dt` must be an integer multiple of
/// `h_ref`.
pub fn reference_solution<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    sample_dt: f64,
    n_samples: usize,
    h_ref: f64,
    agreement_tol: f64,
    tol: f64,
    max_iters: usize,
) -> Result<Reference<D>, Error> {
    if !(h_ref > 0.0) || !(sample_dt > 0.0) {
        return Err(Error::InvalidSpec {
            reason: format!(
                "sample spacing {sample_dt} and internal step {h_ref} must be positive"
            ),
        });
    }
    let per_sample = (sample_dt / h_ref).round();
    if per_sample < 1.0 || (per_sample * h_ref - sample_dt).abs() > 1e-9 * sample_dt {
        return Err(Error::InvalidSpec {
            reason: format!(
                "sample spacing {sample_dt} is not an integer multiple of the internal step {h_ref}"
            ),
        });
    }
    let per_sample = per_sample as usize;
    let mut coarse = Compensated::new(*s0);
    let mut fine = Compensated::new(*s0);
    let mut states = Vec::with_capacity(n_samples + 1);
    states.push(*s0);
    let mut max_disagreement = 0.0_f64;
    for j in 1..=n_samples {
        for _ in 0..per_sample {
            coarse.advance(ham, h_ref, tol, max_iters)?;
            fine.advance(ham, 0.5 * h_ref, tol, max_iters)?;
            fine.advance(ham, 0.5 * h_ref, tol, max_iters)?;
        }
        let disagreement = global_error(&coarse.z, &fine.z);
        if disagreement > agreement_tol {
            return Err(Error::ReferenceUnreliable {
                t: j as f64 * sample_dt,
                disagreement,
            });
        }
        max_disagreement = max_disagreement.max(disagreement);
        states.push(fine.z);
    }
    Ok(Reference {
        states,
        sample_dt,
        max_disagreement,
    })
}
