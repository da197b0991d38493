//! Run records and measurement tools: error channels, growth-rate fits,
//! numerical symplecticity checks, a two-trajectory Lyapunov estimator,
//! and surface-of-section extraction.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::flows::Hamiltonian;
use crate::integrators::{IntegratorSpec, Stepper};
use crate::phase::matrix::standard_j;
use crate::phase::{ExtendedState, State};

/// Provenance of a recorded run, echoed into output files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub method: String,
    pub problem: String,
    pub h: f64,
    pub seed: u64,
    pub wall_seconds: f64,
}

/// One diagnostic sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Two-norm distance to the reference trajectory; NaN when no
    /// reference was supplied.
    pub ge: f64,
    /// Absolute energy drift from the initial state.
    pub ghe: f64,
    /// Extended-state distance from the diagonal submanifold before
    /// projection (0 for methods that never leave it).
    pub delta: f64,
    /// Componentwise drift of a monitored conserved vector, when one was
    /// installed.
    pub j_drift: Option<[f64; 3]>,
}

/// A completed run: metadata plus its sample series.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub meta: RunMeta,
    pub samples: Vec<Sample>,
}

/// Which sample field a fit or window scan reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    GlobalError,
    EnergyError,
    Discrepancy,
}

fn channel_value(sample: &Sample, channel: Channel) -> f64 {
    match channel {
        Channel::GlobalError => sample.ge,
        Channel::EnergyError => sample.ghe,
        Channel::Discrepancy => sample.delta,
    }
}

/// Two-norm distance between two states over all coordinates.
pub fn global_error<const D: usize>(a: &State<D>, b: &State<D>) -> f64 {
    let mut acc = 0.0;
    for i in 0..State::<D>::FLAT_DIM {
        let d = a.coord(i) - b.coord(i);
        acc += d * d;
    }
    acc.sqrt()
}

/// Absolute drift of the energy at `s` from a stored initial value.
pub fn energy_error<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s: &State<D>,
    initial_energy: f64,
) -> f64 {
    (ham.value(s) - initial_energy).abs()
}

/// Largest finite value of the channel over samples with t in
/// [window.0, window.1]. NaN samples are skipped; returns NaN when the
/// window holds no finite value.
pub fn max_in_window(record: &RunRecord, channel: Channel, window: (f64, f64)) -> f64 {
    record
        .samples
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .map(|s| channel_value(s, channel))
        .fold(f64::NAN, f64::max)
}

/// Result of a log-log least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    /// Exponent of the fitted power law value = C * t^slope.
    pub slope: f64,
    /// ln C.
    pub intercept: f64,
    pub r_squared: f64,
    /// The time window the fit actually used.
    pub window: (f64, f64),
}

/// Fit value = C * t^slope over samples with t in the window, by least
/// squares on (ln t, ln value). Samples with a nonpositive or non-finite
/// value are dropped; fewer than 10 usable samples is an error.
pub fn fit_growth(
    record: &RunRecord,
    channel: Channel,
    window: (f64, f64),
) -> Result<GrowthFit, Error> {
    let points: Vec<(f64, f64)> = record
        .samples
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1 && s.t > 0.0)
        .map(|s| (s.t, channel_value(s, channel)))
        .filter(|&(_, v)| v.is_finite() && v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if points.len() < 10 {
        return Err(Error::FitError {
            reason: format!(
                "need at least 10 positive samples in [{}, {}], found {}",
                window.0,
                window.1,
                points.len()
            ),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::FitError {
            reason: "all samples share one time; slope is undefined".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(GrowthFit {
        slope,
        intercept,
        r_squared,
        window,
    })
}

const FD_STEP: f64 = 1e-6;

/// Numerical symplecticity defect of a one-step map at a point.
///
/// Builds the Jacobian by central differences (step 1e-6) and returns the
/// max-abs entry of M^T J M - J. Exactly symplectic smooth maps score near
/// 1e-10 (finite-difference noise); a non-symplectic first-order method at
/// a moderate step scores well above 1e-3.
pub fn symplecticity_defect<const D: usize, E>(
    mut map: impl FnMut(&State<D>) -> Result<State<D>, E>,
    at: &State<D>,
) -> Result<f64, Error>
where
    Error: From<E>,
{
    let n = State::<D>::FLAT_DIM;
    let mut jac = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut plus = *at;
        plus.set_coord(col, at.coord(col) + FD_STEP);
        let mut minus = *at;
        minus.set_coord(col, at.coord(col) - FD_STEP);
        // Divide by the difference as actually represented, not the nominal
        // 2 * step, so the quotient is free of the perturbation's rounding.
        let denom = plus.coord(col) - minus.coord(col);
        let fp = map(&plus)?;
        let fm = map(&minus)?;
        for row in 0..n {
            jac[(row, col)] = (fp.coord(row) - fm.coord(row)) / denom;
        }
    }
    let j = standard_j(D);
    let defect = (jac.transpose() * &j * &jac - j).amax();
    if !defect.is_finite() {
        return Err(Error::Domain {
            reason: "symplecticity defect is not finite".into(),
        });
    }
    Ok(defect)
}

/// Running two-trajectory Lyapunov estimate.
///
/// A shadow trajectory starts offset by `d0` in the first momentum
/// coordinate and is pulled back to distance `d0` along the current
/// separation after every step. Returns (t, sigma(t)) per step, where
/// sigma(t_n) is the average of ln(d_k / d0) over the first n steps
/// divided by h. A sound estimate should not change by more than a factor
/// of 2 when d0 moves a decade.
pub fn lyapunov_exponent<const D: usize, H: Hamiltonian<D>>(
    ham: &H,
    s0: &State<D>,
    spec: &IntegratorSpec<D>,
    h: f64,
    n_steps: usize,
    d0: f64,
) -> Result<Vec<(f64, f64)>, Error> {
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(Error::InvalidSpec {
            reason: format!("initial separation must be positive and finite, got {d0}"),
        });
    }
    if n_steps == 0 {
        return Err(Error::InvalidSpec {
            reason: "n_steps must be at least 1".into(),
        });
    }
    let mut shadow_start = *s0;
    shadow_start.p[0] += d0;
    let mut main = Stepper::new(ham, *s0, *spec, h)?;
    let mut shadow = Stepper::new(ham, shadow_start, *spec, h)?;
    let mut log_sum = 0.0;
    let mut series = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let wrap = |e: Error| Error::StepFailed {
            step: n,
            source: Box::new(e),
        };
        main.step().map_err(wrap)?;
        shadow.step().map_err(wrap)?;
        let a = main.state();
        let b = shadow.state();
        let d = global_error(&a, &b);
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain {
                reason: format!("trajectory separation degenerated to {d} at step {n}"),
            });
        }
        log_sum += (d / d0).ln();
        let t = n as f64 * h;
        series.push((t, log_sum / t));
        let scale = d0 / d;
        let mut renorm = a;
        for i in 0..State::<D>::FLAT_DIM {
            renorm.set_coord(i, a.coord(i) + scale * (b.coord(i) - a.coord(i)));
        }
        shadow.set_state(renorm);
    }
    Ok(series)
}

/// One upward section crossing, located by linear interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<const D: usize> {
    pub t: f64,
    pub state: State<D>,
}

fn extended_coord<const D: usize>(e: &ExtendedState<D>, i: usize) -> f64 {
    match i / D {
        0 => e.p[i % D],
        1 => e.x[i % D],
        2 => e.q[i % D],
        _ => e.y[i % D],
    }
}

/// Scan a sampled trajectory for upward crossings of a coordinate
/// hyperplane.
///
/// `section_index` picks a flat extended coordinate in the order p, x, q,
/// y (so index D..2D is the second copy's momentum, the surface the
/// sections of the extended system are usually taken on). A crossing is a
/// consecutive pair whose section value goes from negative to nonnegative;
/// the crossing time and the primary copy's state come from linear
/// interpolation between the two samples.
pub fn poincare_section<const D: usize>(
    samples: &[(f64, ExtendedState<D>)],
    section_index: usize,
) -> Result<Vec<Crossing<D>>, Error> {
    if section_index >= 4 * D {
        return Err(Error::InvalidSpec {
            reason: format!(
                "section coordinate {section_index} out of range for {} extended coordinates",
                4 * D
            ),
        });
    }
    let mut crossings = Vec::new();
    for pair in samples.windows(2) {
        let (t0, e0) = &pair[0];
        let (t1, e1) = &pair[1];
        let v0 = extended_coord(e0, section_index);
        let v1 = extended_coord(e1, section_index);
        if v0 < 0.0 && v1 >= 0.0 {
            let alpha = v0 / (v0 - v1);
            let s0 = e0.primary();
            let s1 = e1.primary();
            let mut state = s0;
            for i in 0..State::<D>::FLAT_DIM {
                state.set_coord(i, s0.coord(i) + alpha * (s1.coord(i) - s0.coord(i)));
            }
            crossings.push(Crossing {
                t: t0 + alpha * (t1 - t0),
                state,
            });
        }
    }
    Ok(crossings)
}
