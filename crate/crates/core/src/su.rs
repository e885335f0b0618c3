//! Single-user solver: closed-form Dinkelbach power control with MRT and
//! sequential position update at the maximum antenna speed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::metrics::{travel, Objective};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::search::{sequential_update, SearchOptions};

/// Unit-norm maximum-ratio direction `h / ||h||`.
pub fn mrt_direction(h: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let norm = h.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroChannel);
    }
    Ok(h.unscale(norm))
}

/// Constants of the single-user ratio `a log2(1 + p g / s2) / (a p + b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachContext {
    /// Transmission time `T - tau` (s).
    pub a: f64,
    /// Fixed energy `a P_s + P_M sum tau_n` (J).
    pub b: f64,
    /// `||h||^2`.
    pub channel_gain: f64,
    pub sigma2: f64,
    pub p_max: f64,
    pub tolerance: f64,
}

impl DinkelbachContext {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.a) {
            return Err(Error::Precondition(format!("a must be positive, got {}", self.a)));
        }
        if !ok(self.b) {
            return Err(Error::Precondition(format!("b must be positive, got {}", self.b)));
        }
        if !(self.channel_gain.is_finite() && self.channel_gain >= 0.0) || !ok(self.sigma2) || !ok(self.p_max) {
            return Err(Error::Precondition("gain, noise and power budget must be positive".into()));
        }
        if !ok(self.tolerance) {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// The ratio at transmit power `p`.
    pub fn ratio(&self, p: f64) -> f64 {
        self.a * (p * self.channel_gain / self.sigma2).ln_1p() / LN_2 / (self.a * p + self.b)
    }

    /// Maximizer of `a log2(1 + p g / s2) - eta a p` on `[0, P_max]`.
    pub fn best_power(&self, eta: f64) -> f64 {
        if eta <= 0.0 || self.channel_gain <= 0.0 {
            return if self.channel_gain > 0.0 { self.p_max } else { 0.0 };
        }
        (1.0 / (eta * LN_2) - self.sigma2 / self.channel_gain).clamp(0.0, self.p_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerControl {
    pub power: f64,
    pub eta: f64,
    /// `eta` iterates, starting from the zero-power value 0.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_DINKELBACH: usize = 100;

/// Dinkelbach iteration from zero power until successive ratios differ by
/// less than `ctx.tolerance`.
pub fn dinkelbach_power(ctx: &DinkelbachContext) -> PowerControl {
    let mut p = 0.0;
    let mut eta = ctx.ratio(p);
    let mut trace = vec![eta];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_DINKELBACH {
        iterations += 1;
        p = ctx.best_power(eta);
        let next = ctx.ratio(p);
        trace.push(next);
        let done = (next - eta).abs() < ctx.tolerance;
        eta = next;
        if done {
            converged = true;
            break;
        }
    }
    PowerControl {
        power: p,
        eta,
        trace,
        iterations,
        converged,
    }
}

/// Tolerances of the single-user solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuOptions {
    pub objective: Objective,
    pub search: SearchOptions,
    pub dinkelbach_tolerance: f64,
}

impl Default for SuOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Block,
            search: SearchOptions::default(),
            dinkelbach_tolerance: 1e-9,
        }
    }
}

/// Best power for the configuration `dpv` under `options.objective`.
pub(crate) fn su_power(instance: &Instance, dpv: &[usize], options: &SuOptions) -> PowerControl {
    let model = instance.energy_model(options.objective);
    let gain: f64 = dpv.iter().map(|&m| instance.table.get(0, m).norm_sqr()).sum();
    let (total, max) = travel(&instance.array.cpv, dpv, instance.step());
    let (a, b) = model.fractional_terms(total, max);
    let ctx = DinkelbachContext {
        a,
        b,
        channel_gain: gain,
        sigma2: instance.scenario.noise_power,
        p_max: instance.scenario.p_max,
        tolerance: options.dinkelbach_tolerance,
    };
    if a <= 0.0 || b <= 0.0 {
        return PowerControl {
            power: 0.0,
            eta: 0.0,
            trace: vec![0.0],
            iterations: 0,
            converged: true,
        };
    }
    dinkelbach_power(&ctx)
}

/// MRT precoder with power `p` at grid indices `dpv`.
pub(crate) fn mrt_precoder(instance: &Instance, dpv: &[usize], p: f64) -> Result<DMatrix<Complex64>> {
    let h = instance.channel(dpv).column(0).into_owned();
    Ok(DMatrix::from_column_slice(h.len(), 1, (mrt_direction(&h)? * Complex64::from(p.sqrt())).as_slice()))
}

fn require_single_user(instance: &Instance) -> Result<()> {
    if instance.num_users() != 1 {
        return Err(Error::Precondition(format!(
            "single-user solver called with {} users",
            instance.num_users()
        )));
    }
    Ok(())
}

/// Sequential position update where every candidate is scored by its
/// Dinkelbach-optimal ratio; returns the sorted configuration with MRT.
pub fn su_position_search(instance: &Instance, options: &SuOptions) -> Result<Solution> {
    require_single_user(instance)?;
    let space = instance.search_space();
    let outcome = sequential_update(&space, instance.array.cpv.clone(), &options.search, |x| {
        su_power(instance, x, options).eta
    });
    let mut dpv = outcome.dpv;
    dpv.sort_unstable();
    let power = su_power(instance, &dpv, options);
    let w = mrt_precoder(instance, &dpv, power.power)?;
    let diagnostics = Diagnostics {
        ee_trace: outcome.trace,
        rounds: outcome.rounds,
        evaluations: outcome.evaluations,
        dinkelbach_iterations: power.iterations,
        eta_trace: power.trace,
        converged: outcome.converged && power.converged,
        ..Diagnostics::default()
    };
    instance.solution(dpv, w, diagnostics)
}

/// Single-user solver at the maximum speed with the block EE objective.
pub fn su_solve(instance: &Instance) -> Result<Solution> {
    su_position_search(instance, &SuOptions::default())
}
