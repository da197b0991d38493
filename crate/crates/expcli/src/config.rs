//! Flat `key = value` run configuration files.
//!
//! One assignment per line, dotted keys for sections, `#` starts a
//! comment line, blank lines are ignored. Every key must be consumed by
//! the command that loads the file; leftovers are reported as config
//! errors so typos cannot silently fall back to defaults.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use extphase::{
    Family, FactorPair, IntegratorSpec, Mixing, Order, PNBinary, State, TrajectoryPreset,
    WeightPolicy, WeightVectors,
};

use crate::CliError;

pub struct Config {
    entries: BTreeMap<String, String>,
    consumed: RefCell<BTreeSet<String>>,
}

pub fn config_err(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(config_err(format!("line {}: empty key or value", lineno + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(config_err(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(Config {
            entries,
            consumed: RefCell::new(BTreeSet::new()),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.entries.get(key);
        if v.is_some() {
            self.consumed.borrow_mut().insert(key.to_string());
        }
        v.map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key)
            .ok_or_else(|| config_err(format!("missing required key `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        parse_f64(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| config_err(format!("key `{key}`: `{v}` is not a nonnegative integer"))),
            None => Ok(default),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.raw(key) {
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| config_err(format!("key `{key}`: `{v}` is not a nonnegative integer"))),
            None => Ok(default),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|cell| parse_f64(key, cell.trim()))
            .collect()
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            Some(raw) => raw.split(',').map(|cell| parse_f64(key, cell.trim())).collect(),
            None => Ok(default.to_vec()),
        }
    }

    pub fn str_list_or(&self, key: &str, default: &[&str]) -> Vec<String> {
        match self.raw(key) {
            Some(raw) => raw.split(',').map(|s| s.trim().to_string()).collect(),
            None => default.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Reject keys no getter asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let consumed = self.consumed.borrow();
        let unknown: Vec<&String> = self
            .entries
            .keys()
            .filter(|k| !consumed.contains(*k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            let list: Vec<String> = unknown.iter().map(|k| format!("`{k}`")).collect();
            Err(config_err(format!("unknown key(s): {}", list.join(", "))))
        }
    }

    /// Sorted `key = value` lines for the output metadata header.
    pub fn echo_lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .map_err(|_| config_err(format!("key `{key}`: `{v}` is not a number")))
}

/// The problem a config selects, with its initial state resolved.
pub enum ProblemSetup {
    One { s0: State<1> },
    Pn { ham: PNBinary, s0: State<5> },
}

impl ProblemSetup {
    pub fn dim(&self) -> usize {
        match self {
            ProblemSetup::One { .. } => 1,
            ProblemSetup::Pn { .. } => 5,
        }
    }
}

fn fixed_array<const N: usize>(key: &str, v: Vec<f64>) -> Result<[f64; N], CliError> {
    let n = v.len();
    v.try_into()
        .map_err(|_| config_err(format!("key `{key}`: expected {N} comma-separated values, got {n}")))
}

/// Resolve `problem.*` keys. Custom spinning-binary states must keep every
/// |xi_i| strictly below the spin magnitude Lambda_i; the closed boundary
/// |xi_i| = Lambda_i is reserved for the bundled presets, whose data pin
/// it deliberately.
pub fn build_problem(cfg: &Config) -> Result<ProblemSetup, CliError> {
    match cfg.str_or("problem.name", "integrable1d") {
        "integrable1d" => {
            let p0 = cfg.f64_list_or("problem.p0", &[0.0])?;
            let q0 = cfg.f64_list_or("problem.q0", &[-3.0])?;
            Ok(ProblemSetup::One {
                s0: State::new(fixed_array("problem.p0", p0)?, fixed_array("problem.q0", q0)?),
            })
        }
        "pn" => {
            if let Some(preset) = cfg.raw("problem.preset") {
                let preset = match preset {
                    "traj1" => TrajectoryPreset::Regular,
                    "traj2" => TrajectoryPreset::Chaotic,
                    other => {
                        return Err(config_err(format!(
                            "problem.preset must be traj1 or traj2, got `{other}`"
                        )))
                    }
                };
                return Ok(ProblemSetup::Pn {
                    ham: preset.problem(),
                    s0: preset.initial_state(),
                });
            }
            let beta = cfg.f64("problem.beta")?;
            let c = cfg.f64("problem.c")?;
            let magnitudes: [f64; 2] =
                fixed_array("problem.spin_magnitudes", cfg.f64_list("problem.spin_magnitudes")?)?;
            let p0: [f64; 5] = fixed_array("problem.p0", cfg.f64_list("problem.p0")?)?;
            let q0: [f64; 5] = fixed_array("problem.q0", cfg.f64_list("problem.q0")?)?;
            for (i, lambda) in magnitudes.iter().enumerate() {
                let xi = p0[3 + i];
                if xi.abs() >= *lambda {
                    return Err(config_err(format!(
                        "spin {i} out of domain: |xi| = {} must stay below Lambda = {lambda}",
                        xi.abs()
                    )));
                }
            }
            Ok(ProblemSetup::Pn {
                ham: PNBinary::new(beta, c, magnitudes),
                s0: State::new(p0, q0),
            })
        }
        other => Err(config_err(format!(
            "problem.name must be integrable1d or pn, got `{other}`"
        ))),
    }
}

/// Map a compact method token (the sweep-list and output-label form) to
/// its family and order.
pub fn family_order(token: &str) -> Result<(Family, Order), CliError> {
    Ok(match token {
        "expsymp2" => (Family::ExpSymp, Order::Two),
        "expsymp4" => (Family::ExpSymp, Order::Four),
        "irk2" | "implicit_midpoint" => (Family::ImplicitMidpoint, Order::Two),
        "irk4" | "gauss4" => (Family::Gauss4, Order::Four),
        "semisymp2" => (Family::Semiexplicit, Order::Two),
        "semisymp4" => (Family::Semiexplicit, Order::Four),
        "euler" => (Family::Euler, Order::Two),
        other => {
            return Err(config_err(format!(
                "unknown method token `{other}` (expected expsymp2/4, irk2/4, semisymp2/4, or euler)"
            )))
        }
    })
}

fn parse_order(cfg: &Config, default: Order) -> Result<Order, CliError> {
    match cfg.str_or(
        "method.order",
        match default {
            Order::Two => "2",
            Order::Four => "4",
        },
    ) {
        "2" => Ok(Order::Two),
        "4" => Ok(Order::Four),
        other => Err(config_err(format!("method.order must be 2 or 4, got `{other}`"))),
    }
}

/// Resolve `method.*` keys to a full integrator description.
pub fn build_spec<const D: usize>(
    cfg: &Config,
    seed_override: Option<u64>,
) -> Result<IntegratorSpec<D>, CliError> {
    let family_token = cfg.str_or("method.family", "exp_symp").to_string();
    let (family, default_order) = match family_token.as_str() {
        "exp_symp" => (Family::ExpSymp, Order::Two),
        "weighted" => (Family::WeightedProjection, Order::Two),
        "pihajoki" => (Family::Pihajoki, Order::Two),
        "pihajoki_midmix" => (Family::PihajokiMidmix, Order::Two),
        "tao" => (Family::Tao, Order::Two),
        "semiexplicit" => (Family::Semiexplicit, Order::Two),
        "implicit_midpoint" => (Family::ImplicitMidpoint, Order::Two),
        "gauss4" => (Family::Gauss4, Order::Four),
        "euler" => (Family::Euler, Order::Two),
        other => {
            return Err(config_err(format!("unknown method.family `{other}`")))
        }
    };
    let order = parse_order(cfg, default_order)?;
    let mut spec = IntegratorSpec::<D>::new(family, order);
    if let Some(raw) = cfg.raw("method.factors") {
        let pair: [f64; 2] = fixed_array(
            "method.factors",
            raw.split(',').map(|c| parse_f64("method.factors", c.trim())).collect::<Result<_, _>>()?,
        )?;
        spec = spec.with_factors(FactorPair::new(pair[0], pair[1]));
    }
    let policy = match cfg.str_or("method.weight_policy", "constant") {
        "constant" => WeightPolicy::Constant,
        "alternating" => WeightPolicy::Alternating,
        "fresh_random" => WeightPolicy::FreshRandomPerStep,
        other => {
            return Err(config_err(format!(
                "method.weight_policy must be constant, alternating, or fresh_random, got `{other}`"
            )))
        }
    };
    let lambda = cfg.f64_list_or("method.lambda", &[0.5; D])?;
    let xi = cfg.f64_list_or("method.xi", &[0.5; D])?;
    let weights = WeightVectors::new(
        fixed_array("method.lambda", lambda)?,
        fixed_array("method.xi", xi)?,
    );
    spec = spec.with_weights(weights, policy);
    spec = spec.with_omega(cfg.f64_or("method.omega", 1.0)?);
    spec = spec.with_tolerance(
        cfg.f64_or("method.tol", 1e-13)?,
        cfg.usize_or("method.max_iters", 500)?,
    );
    let seed = cfg.u64_or("run.seed", 0)?;
    spec = spec.with_seed(seed_override.unwrap_or(seed));
    spec.validate().map_err(|e| config_err(e.to_string()))?;
    Ok(spec)
}

/// Post-step mixing token for raw extended-space runs.
pub fn parse_mixing(cfg: &Config) -> Result<Mixing, CliError> {
    match cfg.str_or("method.mix", "none") {
        "none" => Ok(Mixing::None),
        "midpoint" => Ok(Mixing::MidpointPermutation),
        other => Err(config_err(format!(
            "method.mix must be none or midpoint, got `{other}`"
        ))),
    }
}

/// Number of steps covering [0, t_end] at step h. t_end must be an
/// integer multiple of h up to a half-ulp per step of float slack; the
/// rejection names both values so the mismatch is visible.
pub fn step_count(t_end: f64, h: f64) -> Result<usize, CliError> {
    if !(h > 0.0) {
        return Err(config_err(format!("run.h must be positive, got {h}")));
    }
    if !(t_end > 0.0) {
        return Err(config_err(format!("run.t_end must be positive, got {t_end}")));
    }
    let n = (t_end / h).round();
    let defect = (n * h - t_end).abs();
    let slack = n.max(1.0) * 0.5 * f64::EPSILON * t_end.max(1.0);
    if n < 1.0 || defect > slack {
        return Err(config_err(format!(
            "t_end = {t_end} is not an integer multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}
