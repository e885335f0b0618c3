use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baselines::SolverSettings;
use crate::error::Result;
use crate::metrics::{cross_gains, sum_rate, sum_rate_from_gains, ChannelMatrix, Precoder};
use crate::mu::{gains_at, mrt_init, sort_with_rows};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::search::sequential_update;
use crate::su::mrt_precoder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WmmseOptions {
    /// Relative sum-rate change that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for WmmseOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WmmseOutcome {
    pub w: Precoder,
    /// Sum rate of the start and of every iterate.
    pub rate_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted-MMSE sum-rate maximization under `tr(W W^H) <= p_max`.
///
/// Each iteration updates the receive scalars, the MSE weights and then the
/// precoder, whose power multiplier is found by bisection.
pub fn wmmse(h: &ChannelMatrix, sigma2: f64, p_max: f64, w0: &Precoder, options: &WmmseOptions) -> WmmseOutcome {
    let (n, k) = h.shape();
    let mut w = w0.clone();
    let mut rate = sum_rate(h, &w, sigma2);
    let mut out = WmmseOutcome {
        w: w.clone(),
        rate_trace: vec![rate],
        iterations: 0,
        converged: false,
    };
    for _ in 0..options.max_iterations {
        out.iterations += 1;
        let g = cross_gains(h, &w);
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        let mut b = DMatrix::<Complex64>::zeros(n, k);
        for u in 0..k {
            let den: f64 = (0..k).map(|i| g[(u, i)].norm_sqr()).sum::<f64>() + sigma2;
            let recv = g[(u, u)] / den;
            let mse = 1.0 - g[(u, u)].norm_sqr() / den;
            let weight = 1.0 / mse.max(1e-300);
            let hk = h.column(u);
            a += &hk * hk.adjoint() * Complex64::from(weight * recv.norm_sqr());
            b.set_column(u, &(&hk * (recv * weight)));
        }
        let eig = SymmetricEigen::new(a);
        let c = eig.eigenvectors.adjoint() * &b;
        let row_power: Vec<f64> = c.row_iter().map(|r| r.norm_squared()).collect();
        let power = |mu: f64| -> f64 {
            eig.eigenvalues
                .iter()
                .zip(&row_power)
                .map(|(&l, &p)| p / (l + mu).powi(2))
                .sum()
        };
        let lmax = eig.eigenvalues.max();
        let mu = if eig.eigenvalues.min() > 1e-12 * lmax && power(0.0) <= p_max {
            0.0
        } else {
            let (mut lo, mut hi) = (0.0, (row_power.iter().sum::<f64>() / p_max).sqrt());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if power(mid) > p_max {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            hi
        };
        let scaled = DMatrix::from_fn(n, k, |j, i| c[(j, i)] / (eig.eigenvalues[j] + mu));
        w = &eig.eigenvectors * scaled;
        let next = sum_rate(h, &w, sigma2);
        out.rate_trace.push(next);
        let done = (next - rate).abs() <= options.tolerance * rate.abs();
        rate = next;
        if done {
            out.converged = true;
            break;
        }
    }
    out.w = w;
    out
}

/// Sum-rate maximization: full-power precoding (MRT for one user, WMMSE
/// otherwise) alternated with sequential position updates on the sum rate.
/// The returned breakdown carries the true EE.
pub fn sm_solve(instance: &Instance) -> Result<Solution> {
    sm_solve_with(instance, &SolverSettings::default())
}

pub fn sm_solve_with(instance: &Instance, settings: &SolverSettings) -> Result<Solution> {
    let s = &instance.scenario;
    let space = instance.search_space();
    let cpv = instance.array.cpv.clone();
    let mut diag = Diagnostics::default();
    if instance.num_users() == 1 {
        let snr = s.p_max / s.noise_power;
        let out = sequential_update(&space, cpv, &settings.search, |x| {
            let gain: f64 = x.iter().map(|&m| instance.table.get(0, m).norm_sqr()).sum();
            (1.0 + snr * gain).log2()
        });
        let mut dpv = out.dpv;
        dpv.sort_unstable();
        diag.ee_trace = out.trace;
        diag.rounds = out.rounds;
        diag.evaluations = out.evaluations;
        diag.converged = out.converged;
        let w = mrt_precoder(instance, &dpv, s.p_max)?;
        return instance.solution(dpv, w, diag);
    }
    let options = settings.wmmse;
    let mut x = cpv;
    let full = mrt_init(&instance.channel(&x), s.p_max) * Complex64::from(2f64.sqrt());
    let mut w = wmmse(&instance.channel(&x), s.noise_power, s.p_max, &full, &options).w;
    let mut rate = sum_rate(&instance.channel(&x), &w, s.noise_power);
    diag.ee_trace.push(rate);
    for _ in 0..settings.max_ao {
        diag.ao_iterations += 1;
        let out = sequential_update(&space, x.clone(), &settings.search, |x| {
            sum_rate_from_gains(&gains_at(instance, x, &w), s.noise_power)
        });
        diag.rounds += out.rounds;
        diag.evaluations += out.evaluations;
        (x, w) = sort_with_rows(&out.dpv, &w);
        let h = instance.channel(&x);
        w = wmmse(&h, s.noise_power, s.p_max, &w, &options).w;
        let next = sum_rate(&h, &w, s.noise_power);
        diag.ee_trace.push(next);
        let done = (next - rate).abs() <= options.tolerance * rate;
        rate = next;
        if done {
            diag.converged = true;
            break;
        }
    }
    instance.solution(x, w, diag)
}
