//! Monte-Carlo orchestration over sweep points and channel realizations.
//!
//! Realization `i` uses the same channel seed at every sweep point and for
//! every scheme, so comparisons between schemes and between neighbouring
//! sweep points are paired.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{solve_with, Scheme};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, SweepAxis};
use crate::problem::Instance;

/// Aggregate of one scheme at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub ee_mean: f64,
    /// Sample standard deviation of the per-realization EE.
    pub ee_std: f64,
    pub rate_mean: f64,
    pub e_motor_mean: f64,
    pub tau_mean: f64,
    /// Realizations whose solver stopped at an iteration cap.
    pub failures: usize,
}

/// Outcome of one scheme on one channel realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub realization: usize,
    pub seed: u64,
    pub ee: f64,
    pub sum_rate: f64,
    pub e_motor: f64,
    pub tau: f64,
    pub converged: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Channel seed of realization `i`; stable across platforms and releases.
pub fn realization_seed(master: u64, axis: SweepAxis, i: usize) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a(axis.name())) ^ i as u64)
}

/// Seed of the randomized schemes, derived from the channel seed.
pub fn scheme_seed(channel_seed: u64) -> u64 {
    splitmix64(channel_seed ^ 0x5053_4f5f_5345_4544)
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config {
            field: "threads".into(),
            reason: e.to_string(),
        })?;
    Ok(pool.install(job))
}

fn run_realization(config: &ExperimentConfig, value: f64, i: usize) -> Result<Vec<RealizationRecord>> {
    let seed = realization_seed(config.seed, config.sweep.axis, i);
    let instance = Instance::from_seed(&config.scenario_at(value), &config.motor, seed)?;
    config
        .schemes
        .iter()
        .map(|&scheme| {
            let sol = solve_with(scheme, &instance, scheme_seed(seed), &config.settings)?;
            Ok(RealizationRecord {
                sweep_value: value,
                scheme,
                realization: i,
                seed,
                ee: sol.breakdown.ee,
                sum_rate: sol.breakdown.sum_rate,
                e_motor: sol.breakdown.e_motor,
                tau: sol.breakdown.tau,
                converged: sol.diagnostics.converged,
            })
        })
        .collect()
}

/// Every scheme on every realization at every sweep point, sorted by sweep
/// point, then scheme (in config order), then realization.
pub fn run_experiment_detailed(config: &ExperimentConfig) -> Result<Vec<RealizationRecord>> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> = (0..config.sweep.values.len())
        .flat_map(|p| (0..config.realizations).map(move |i| (p, i)))
        .collect();
    let batches = with_pool(config.threads, || {
        tasks
            .par_iter()
            .map(|&(p, i)| run_realization(config, config.sweep.values[p], i).map(|r| (p, r)))
            .collect::<Result<Vec<_>>>()
    })??;
    let rank = |s: Scheme| config.schemes.iter().position(|&x| x == s).unwrap_or(usize::MAX);
    let mut records: Vec<(usize, RealizationRecord)> = batches
        .into_iter()
        .flat_map(|(p, rs)| rs.into_iter().map(move |r| (p, r)))
        .collect();
    records.sort_by_key(|(p, r)| (*p, rank(r.scheme), r.realization));
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; zero for a single value.
fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Collapses sorted records into one row per (sweep point, scheme).
pub fn aggregate(records: &[RealizationRecord]) -> Vec<ResultRow> {
    records
        .chunk_by(|a, b| a.sweep_value == b.sweep_value && a.scheme == b.scheme)
        .map(|group| {
            let col = |f: fn(&RealizationRecord) -> f64| group.iter().map(f).collect::<Vec<_>>();
            let ee = col(|r| r.ee);
            ResultRow {
                sweep_value: group[0].sweep_value,
                scheme: group[0].scheme,
                ee_mean: mean(&ee),
                ee_std: std_dev(&ee),
                rate_mean: mean(&col(|r| r.sum_rate)),
                e_motor_mean: mean(&col(|r| r.e_motor)),
                tau_mean: mean(&col(|r| r.tau)),
                failures: group.iter().filter(|r| !r.converged).count(),
            }
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    Ok(aggregate(&run_experiment_detailed(config)?))
}

/// Mean and standard error of paired per-realization differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedDifference {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl PairedDifference {
    pub fn from_pairs(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples differ in length");
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self {
            mean: mean(&d),
            std_error: std_dev(&d) / (d.len() as f64).sqrt(),
            count: d.len(),
        }
    }

    /// Mean difference exceeds `k` paired standard errors.
    pub fn exceeds(&self, k: f64) -> bool {
        self.mean > k * self.std_error
    }

    /// Mean difference lies within `k` paired standard errors of zero.
    pub fn within(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.std_error
    }
}

/// Per-realization EE of `scheme` at `sweep_value`, in realization order.
pub fn ee_samples(records: &[RealizationRecord], sweep_value: f64, scheme: Scheme) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.sweep_value == sweep_value && r.scheme == scheme)
        .map(|r| r.ee)
        .collect()
}

/// Paired EE difference `a - b`, either between two schemes at one sweep
/// point or between two sweep points of one scheme.
pub fn paired_ee(records: &[RealizationRecord], a: (f64, Scheme), b: (f64, Scheme)) -> PairedDifference {
    PairedDifference::from_pairs(&ee_samples(records, a.0, a.1), &ee_samples(records, b.0, b.1))
}
