//! Antenna movement: delays, trajectories, collision checks and the
//! sorting-based renumbering that removes every crossing.
//!
//! All antennas move at one constant speed `v`, each along a straight line
//! from its current position `x0_n` to its destination `x_n`, and then wait.
//! Sorting the destinations (and permuting precoder rows with them) never
//! lengthens any delay sum and keeps every pair ordered during the move.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-antenna delays `tau_n = |x_n - x0_n| / v` and their maximum.
pub fn movement_delays(cpv: &[f64], dpv: &[f64], speed: f64) -> Result<(Vec<f64>, f64)> {
    if !(speed > 0.0) {
        return Err(Error::Precondition(format!("speed must be positive, got {speed}")));
    }
    if cpv.len() != dpv.len() {
        return Err(Error::Dimension(format!("cpv has {} entries, dpv {}", cpv.len(), dpv.len())));
    }
    let delays: Vec<f64> = cpv.iter().zip(dpv).map(|(a, b)| (b - a).abs() / speed).collect();
    let tau = delays.iter().copied().fold(0.0, f64::max);
    Ok((delays, tau))
}

/// A complete movement from the current to the destination position vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePlan {
    pub cpv: Vec<f64>,
    pub dpv: Vec<f64>,
    pub speed: f64,
    pub delays: Vec<f64>,
    pub tau: f64,
}

impl MovePlan {
    pub fn new(cpv: Vec<f64>, dpv: Vec<f64>, speed: f64) -> Result<Self> {
        let (delays, tau) = movement_delays(&cpv, &dpv, speed)?;
        Ok(Self {
            cpv,
            dpv,
            speed,
            delays,
            tau,
        })
    }

    /// Position of antenna `n` at time `t`.
    pub fn position(&self, n: usize, t: f64) -> Result<f64> {
        if !(0.0..=self.tau).contains(&t) {
            return Err(Error::TimeOutOfRange { time: t, tau: self.tau });
        }
        Ok(self.position_unchecked(n, t))
    }

    fn position_unchecked(&self, n: usize, t: f64) -> f64 {
        if t < self.delays[n] {
            let dir = (self.dpv[n] - self.cpv[n]).signum();
            self.cpv[n] + self.speed * t * dir
        } else {
            self.dpv[n]
        }
    }

    /// Velocity of antenna `n` on the open segment right after `t`.
    fn velocity_after(&self, n: usize, t: f64) -> f64 {
        if t < self.delays[n] {
            self.speed * (self.dpv[n] - self.cpv[n]).signum()
        } else {
            0.0
        }
    }
}

/// Position of antenna `n` at time `t` along `plan`.
pub fn trajectory_position(plan: &MovePlan, n: usize, t: f64) -> Result<f64> {
    if n >= plan.cpv.len() {
        return Err(Error::Dimension(format!("antenna {n} of {}", plan.cpv.len())));
    }
    plan.position(n, t)
}

/// Outcome of the trajectory collision check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CollisionVerdict {
    Ok,
    /// Antennas `i < j` come closer than the threshold starting at `time`.
    Violation { i: usize, j: usize, time: f64 },
}

impl CollisionVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, CollisionVerdict::Ok)
    }
}

/// Exact check that every pair keeps `|s_i(t) - s_j(t)| >= d_th` on `[0, tau]`.
///
/// Each pairwise gap is piecewise linear with breakpoints at the two arrival
/// times, so its minimum on each segment is at an endpoint or at a zero crossing.
pub fn check_collision_free(plan: &MovePlan, d_th: f64) -> CollisionVerdict {
    let n = plan.cpv.len();
    let tol = 1e-12 * d_th.max(1e-300);
    let mut earliest: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            if let Some(t) = first_violation(plan, i, j, d_th - tol) {
                let better = match earliest {
                    None => true,
                    Some((_, _, t0)) => t < t0,
                };
                if better {
                    earliest = Some((i, j, t));
                }
            }
        }
    }
    match earliest {
        None => CollisionVerdict::Ok,
        Some((i, j, time)) => CollisionVerdict::Violation { i, j, time },
    }
}

fn first_violation(plan: &MovePlan, i: usize, j: usize, limit: f64) -> Option<f64> {
    let mut knots = vec![0.0, plan.delays[i].min(plan.tau), plan.delays[j].min(plan.tau), plan.tau];
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    if knots.len() == 1 {
        knots.push(knots[0]);
    }
    let gap = |t: f64| plan.position_unchecked(i, t) - plan.position_unchecked(j, t);
    for seg in knots.windows(2) {
        let (t0, t1) = (seg[0], seg[1]);
        let d0 = gap(t0);
        if d0.abs() < limit {
            return Some(t0);
        }
        if t1 <= t0 {
            continue;
        }
        let rate = plan.velocity_after(i, t0) - plan.velocity_after(j, t0);
        if rate == 0.0 {
            continue;
        }
        // |d0 + rate (t - t0)| reaches `limit` while shrinking
        let target = if d0 > 0.0 { limit } else { -limit };
        let t_hit = t0 + (target - d0) / rate;
        let shrinking = d0.signum() * rate < 0.0;
        // `limit` already sits a hair below d_th, so a touch at exactly d_th
        // at the segment end does not register
        if shrinking && t_hit < t1 {
            return Some(t_hit.max(t0));
        }
    }
    None
}

/// Sorts the destinations ascending and permutes precoder rows with them.
///
/// Returns `(sorted dpv, permuted precoder, q)` where entry `n` of the outputs
/// is entry `q[n]` of the inputs.
pub fn renumber_sorted(
    dpv: &[f64],
    precoder: &DMatrix<Complex64>,
) -> Result<(Vec<f64>, DMatrix<Complex64>, Vec<usize>)> {
    if precoder.nrows() != dpv.len() {
        return Err(Error::Dimension(format!(
            "precoder has {} rows for {} antennas",
            precoder.nrows(),
            dpv.len()
        )));
    }
    let q = sort_permutation(dpv);
    debug_assert!(q.windows(2).all(|w| dpv[w[0]] != dpv[w[1]]), "destinations must be distinct");
    let sorted = q.iter().map(|&i| dpv[i]).collect();
    let rows = DMatrix::from_fn(precoder.nrows(), precoder.ncols(), |n, k| precoder[(q[n], k)]);
    Ok((sorted, rows, q))
}

/// Stable ascending permutation `q` with `values[q[0]] <= values[q[1]] <= ...`.
pub fn sort_permutation<T: PartialOrd>(values: &[T]) -> Vec<usize> {
    let mut q: Vec<usize> = (0..values.len()).collect();
    q.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("comparable values"));
    q
}

/// Largest antenna count accepted by [`min_total_delay_oracle`].
pub const ORACLE_MAX_ANTENNAS: usize = 8;

/// Exhaustive minimum of `sum_n |x_{pi(n)} - x0_n| / v` over all permutations `pi`.
pub fn min_total_delay_oracle(cpv: &[f64], dpv: &[f64], speed: f64) -> Result<(Vec<usize>, f64)> {
    let n = cpv.len();
    if n > ORACLE_MAX_ANTENNAS {
        return Err(Error::TooLarge {
            n,
            max: ORACLE_MAX_ANTENNAS,
        });
    }
    if dpv.len() != n {
        return Err(Error::Dimension(format!("cpv has {n} entries, dpv {}", dpv.len())));
    }
    if !(speed > 0.0) {
        return Err(Error::Precondition(format!("speed must be positive, got {speed}")));
    }
    let mut best: (Vec<usize>, f64) = ((0..n).collect(), f64::INFINITY);
    for perm in (0..n).permutations(n) {
        let cost: f64 = perm.iter().enumerate().map(|(k, &p)| (dpv[p] - cpv[k]).abs()).sum();
        if cost < best.1 {
            best = (perm, cost);
        }
    }
    Ok((best.0, best.1 / speed))
}

/// `|a - c| + |b - d| <= |a - d| + |b - c|` for positive `a < b`, `c < d`.
pub fn lemma1_check(a: f64, b: f64, c: f64, d: f64) -> Result<bool> {
    if !(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0) {
        return Err(Error::Precondition("all four numbers must be positive".into()));
    }
    if !(a < b && c < d) {
        return Err(Error::Precondition("need a < b and c < d".into()));
    }
    Ok((a - c).abs() + (b - d).abs() <= (a - d).abs() + (b - c).abs())
}
