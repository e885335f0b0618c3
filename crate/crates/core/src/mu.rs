//! Multi-user solver: Dinkelbach ratio updates around successive convex
//! approximation of the precoder, alternated with sequential position
//! updates at a fixed precoder.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::sort_permutation;
use crate::metrics::{sinr, sum_rate, sum_rate_from_gains, transmit_power, travel, ChannelMatrix, EnergyModel, Objective, Precoder};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::sca::{linearization_point, rotate_columns, sca_subproblem, BarrierOptions, SubproblemData};
use crate::search::{sequential_update, SearchOptions, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecodingOptions {
    /// Relative change of the ratio that ends the Dinkelbach loop.
    pub outer_tolerance: f64,
    /// SCA stops once an iteration raises the parametric objective by less
    /// than this fraction of the weighted sum rate.
    pub sca_tolerance: f64,
    pub max_outer: usize,
    pub max_sca: usize,
    pub barrier: BarrierOptions,
}

impl Default for PrecodingOptions {
    fn default() -> Self {
        Self {
            outer_tolerance: 1e-4,
            sca_tolerance: 1e-4,
            max_outer: 30,
            max_sca: 30,
            barrier: BarrierOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecodingOutcome {
    pub w: Precoder,
    pub eta: f64,
    /// Ratio after the initial precoder and after every outer iteration.
    pub eta_trace: Vec<f64>,
    /// Parametric objective per SCA iteration, one trace per outer iteration.
    pub sca_traces: Vec<Vec<f64>>,
    pub outer_iterations: usize,
    pub subproblems: usize,
    pub newton_steps: usize,
    pub kkt_residual: f64,
    /// `gamma_k - chi_k` at the last accepted subproblem.
    pub sinr_slack_gap: Vec<f64>,
    pub converged: bool,
}

/// MRT columns scaled to a total power of `p_max / 2`.
pub fn mrt_init(h: &ChannelMatrix, p_max: f64) -> Precoder {
    let k = h.ncols();
    let per_user = (p_max / (2.0 * k as f64)).sqrt();
    let mut w = h.clone();
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col *= Complex64::from(per_user / norm);
        }
    }
    w
}

fn ratio(h: &ChannelMatrix, w: &Precoder, a: f64, b: f64, sigma2: f64) -> f64 {
    a * sum_rate(h, w, sigma2) / (a * transmit_power(w) + b)
}

struct ScaRun {
    w: Precoder,
    trace: Vec<f64>,
    subproblems: usize,
    newton_steps: usize,
    kkt: f64,
    gap: Vec<f64>,
}

fn sca_ascent(data: &SubproblemData<'_>, w0: &Precoder, options: &PrecodingOptions) -> Result<ScaRun> {
    let value = |w: &Precoder| {
        data.a * sum_rate(data.h, w, data.sigma2) - data.eta * (data.a * transmit_power(w) + data.b)
    };
    let mut w = rotate_columns(data.h, w0);
    let mut current = value(&w);
    let mut run = ScaRun {
        w: w.clone(),
        trace: vec![current],
        subproblems: 0,
        newton_steps: 0,
        kkt: 0.0,
        gap: Vec::new(),
    };
    for _ in 0..options.max_sca {
        let lin = linearization_point(data.h, &w, data.sigma2);
        let state = match sca_subproblem(data, &lin, &w, &options.barrier) {
            Ok(s) => s,
            // the incumbent already sits at its own true values; nothing to re-centre
            Err(Error::InfeasibleLinearization { .. }) => break,
            Err(e) => return Err(e),
        };
        run.subproblems += 1;
        run.newton_steps += state.newton_steps;
        run.kkt = run.kkt.max(state.kkt.stationarity);
        let next = rotate_columns(data.h, &state.w);
        let next_value = value(&next);
        if !(next_value >= current) {
            break;
        }
        run.gap = (0..next.ncols())
            .map(|k| sinr(data.h, &next, data.sigma2, k) - state.chi[k])
            .collect();
        let gain = next_value - current;
        w = next;
        current = next_value;
        run.trace.push(current);
        if gain < options.sca_tolerance * data.a * sum_rate(data.h, &w, data.sigma2) {
            break;
        }
    }
    run.w = w;
    Ok(run)
}

/// Dinkelbach iterations on the precoder for fixed positions.
///
/// `a = T - tau` and `b = a P_s + P_M sum tau_n` come from the chosen
/// positions. Each outer step maximizes `a sum R - eta (a tr(W W^H) + b)` by
/// SCA, warm-started at the incumbent.
pub fn dinkelbach_precoding(
    h: &ChannelMatrix,
    a: f64,
    b: f64,
    sigma2: f64,
    p_max: f64,
    w0: &Precoder,
    options: &PrecodingOptions,
) -> Result<PrecodingOutcome> {
    if w0.shape() != h.shape() {
        return Err(Error::Dimension(format!(
            "precoder is {:?}, channel {:?}",
            w0.shape(),
            h.shape()
        )));
    }
    let mut w = w0.clone();
    let p = transmit_power(&w);
    if p > p_max {
        w *= Complex64::from((p_max / p).sqrt());
    }
    let mut out = PrecodingOutcome {
        eta: 0.0,
        eta_trace: Vec::new(),
        sca_traces: Vec::new(),
        outer_iterations: 0,
        subproblems: 0,
        newton_steps: 0,
        kkt_residual: 0.0,
        sinr_slack_gap: Vec::new(),
        converged: false,
        w: w.clone(),
    };
    if a <= 0.0 {
        out.eta_trace.push(0.0);
        out.converged = true;
        return Ok(out);
    }
    let mut eta = ratio(h, &w, a, b, sigma2);
    out.eta_trace.push(eta);
    for _ in 0..options.max_outer {
        out.outer_iterations += 1;
        let data = SubproblemData {
            h,
            eta,
            a,
            b,
            sigma2,
            p_max,
        };
        let run = sca_ascent(&data, &w, options)?;
        out.subproblems += run.subproblems;
        out.newton_steps += run.newton_steps;
        out.kkt_residual = out.kkt_residual.max(run.kkt);
        if !run.gap.is_empty() {
            out.sinr_slack_gap = run.gap;
        }
        out.sca_traces.push(run.trace);
        let next = ratio(h, &run.w, a, b, sigma2);
        if next < eta {
            out.converged = true;
            break;
        }
        w = run.w;
        out.eta_trace.push(next);
        let done = (next - eta).abs() <= options.outer_tolerance * eta.abs();
        eta = next;
        if done {
            out.converged = true;
            break;
        }
    }
    out.w = w;
    out.eta = eta;
    Ok(out)
}

/// `H(dpv)^H W` read from the response table.
pub(crate) fn gains_at(instance: &Instance, dpv: &[usize], w: &Precoder) -> DMatrix<Complex64> {
    let k = instance.num_users();
    let mut g = DMatrix::zeros(k, w.ncols());
    for (n, &m) in dpv.iter().enumerate() {
        for u in 0..k {
            let h = instance.table.get(u, m).conj();
            for i in 0..w.ncols() {
                g[(u, i)] += h * w[(n, i)];
            }
        }
    }
    g
}

/// Objective of `(dpv, w)` under an energy model.
pub fn model_ee(instance: &Instance, model: &EnergyModel, dpv: &[usize], w: &Precoder) -> f64 {
    let rate = sum_rate_from_gains(&gains_at(instance, dpv, w), instance.scenario.noise_power);
    let (total, max) = travel(&instance.array.cpv, dpv, instance.step());
    model.ee(rate, transmit_power(w), total, max)
}

/// Sequential position update with `w` fixed (row `n` stays with antenna `n`).
pub fn mu_position_search(
    instance: &Instance,
    w: &Precoder,
    start: Vec<usize>,
    model: &EnergyModel,
    options: &SearchOptions,
) -> SearchOutcome {
    let space = instance.search_space();
    sequential_update(&space, start, options, |x| model_ee(instance, model, x, w))
}

/// Sorts `dpv` ascending and moves precoder rows with their antennas.
pub(crate) fn sort_with_rows(dpv: &[usize], w: &Precoder) -> (Vec<usize>, Precoder) {
    let q = sort_permutation(dpv);
    let sorted = q.iter().map(|&i| dpv[i]).collect();
    let rows = DMatrix::from_fn(w.nrows(), w.ncols(), |n, k| w[(q[n], k)]);
    (sorted, rows)
}

/// Dinkelbach precoding for the positions `dpv` under `objective`.
pub fn precode_at(
    instance: &Instance,
    dpv: &[usize],
    w0: &Precoder,
    objective: Objective,
    options: &PrecodingOptions,
) -> Result<PrecodingOutcome> {
    let model = instance.energy_model(objective);
    let (total, max) = travel(&instance.array.cpv, dpv, instance.step());
    let (a, b) = model.fractional_terms(total, max);
    let s = &instance.scenario;
    dinkelbach_precoding(&instance.channel(dpv), a, b, s.noise_power, s.p_max, w0, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuOptions {
    pub objective: Objective,
    pub precoding: PrecodingOptions,
    pub search: SearchOptions,
    pub max_ao: usize,
    /// Relative EE change that ends the alternation.
    pub ao_tolerance: f64,
}

impl Default for MuOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Block,
            precoding: PrecodingOptions::default(),
            search: SearchOptions::default(),
            max_ao: 20,
            ao_tolerance: 1e-4,
        }
    }
}

pub(crate) fn absorb(diag: &mut Diagnostics, p: &PrecodingOutcome) {
    diag.eta_trace = p.eta_trace.clone();
    diag.dinkelbach_iterations += p.outer_iterations;
    diag.subproblems += p.subproblems;
    diag.newton_steps += p.newton_steps;
    diag.kkt_residual = diag.kkt_residual.max(p.kkt_residual);
    if !p.sinr_slack_gap.is_empty() {
        diag.sinr_slack_gap = p.sinr_slack_gap.clone();
    }
}

/// Alternates precoding and position blocks, starting from the current
/// positions and half-power MRT.
pub fn mu_solve_with(instance: &Instance, options: &MuOptions) -> Result<Solution> {
    let model = instance.energy_model(options.objective);
    let mut x = instance.array.cpv.clone();
    let mut w = mrt_init(&instance.channel(&x), instance.scenario.p_max);
    let mut ee = model_ee(instance, &model, &x, &w);
    let mut diag = Diagnostics {
        ee_trace: vec![ee],
        ..Diagnostics::default()
    };
    let mut converged = false;
    for _ in 0..options.max_ao {
        diag.ao_iterations += 1;
        let p = precode_at(instance, &x, &w, options.objective, &options.precoding)?;
        absorb(&mut diag, &p);
        w = p.w;
        diag.ee_trace.push(model_ee(instance, &model, &x, &w));
        let pos = mu_position_search(instance, &w, x.clone(), &model, &options.search);
        diag.rounds += pos.rounds;
        diag.evaluations += pos.evaluations;
        (x, w) = sort_with_rows(&pos.dpv, &w);
        let next = model_ee(instance, &model, &x, &w);
        diag.ee_trace.push(next);
        let done = (next - ee).abs() <= options.ao_tolerance * ee.abs();
        ee = next;
        if done {
            converged = true;
            break;
        }
    }
    diag.converged = converged;
    instance.solution(x, w, diag)
}

/// Multi-user solver at the maximum speed with the block EE objective.
pub fn mu_solve(instance: &Instance) -> Result<Solution> {
    mu_solve_with(instance, &MuOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Scenario;
    use crate::motor::MotorParams;
    use crate::problem::audit;
    use crate::su::{dinkelbach_power, DinkelbachContext};

    #[test]
    fn mrt_init_uses_half_power() {
        let inst = Instance::from_seed(&Scenario::default(), &MotorParams::am2224(), 1).unwrap();
        let w = mrt_init(&inst.channel(&inst.array.cpv), 1.0);
        assert!((transmit_power(&w) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_user_reduction_matches_closed_form() {
        let s = Scenario {
            num_users: 1,
            ..Scenario::default()
        };
        let inst = Instance::from_seed(&s, &MotorParams::am2224(), 4).unwrap();
        let h = inst.channel(&inst.array.cpv);
        let (a, b) = (0.25, 0.25);
        let out = dinkelbach_precoding(&h, a, b, s.noise_power, s.p_max, &mrt_init(&h, s.p_max), &PrecodingOptions::default()).unwrap();
        let closed = dinkelbach_power(&DinkelbachContext {
            a,
            b,
            channel_gain: h.norm_squared(),
            sigma2: s.noise_power,
            p_max: s.p_max,
            tolerance: 1e-12,
        });
        assert!((out.eta - closed.eta).abs() <= 1e-4 * closed.eta, "{} vs {}", out.eta, closed.eta);
        assert!(out.eta_trace.windows(2).all(|w| w[1] >= w[0]));
        for t in &out.sca_traces {
            assert!(t.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn sorting_moves_rows() {
        let w = DMatrix::from_fn(3, 1, |n, _| Complex64::new(n as f64, 0.0));
        let (x, r) = sort_with_rows(&[9, 2, 5], &w);
        assert_eq!(x, vec![2, 5, 9]);
        assert_eq!(r[(0, 0)].re, 1.0);
        assert_eq!(r[(1, 0)].re, 2.0);
        assert_eq!(r[(2, 0)].re, 0.0);
    }

    #[test]
    fn ao_is_monotone_and_feasible() {
        let motor = MotorParams::am2224();
        for seed in 0..2 {
            let inst = Instance::from_seed(&Scenario::default(), &motor, seed).unwrap();
            let sol = mu_solve(&inst).unwrap();
            let t = &sol.diagnostics.ee_trace;
            assert!(t.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "{t:?}");
            assert!(audit(&inst, &sol).is_feasible());
            assert!((sol.breakdown.ee - t[t.len() - 1]).abs() <= 1e-9 * sol.breakdown.ee);
        }
    }
}
