//! Multi-round sequential position update on the candidate grid.
//!
//! Each round visits antennas `0..N` in order. Antenna `n` is moved to the
//! best grid point that keeps the minimum spacing to every other antenna
//! (at their latest positions) and stays within the travel cap of its own
//! current position, while the others are held fixed.

use serde::{Deserialize, Serialize};

/// Constraints shared by every position search, in grid-index units.
#[derive(Debug, Clone, Copy)]
pub struct SearchSpace<'a> {
    pub cpv: &'a [usize],
    pub grid_len: usize,
    pub min_gap: usize,
    pub max_travel: usize,
}

impl SearchSpace<'_> {
    /// Grid points antenna `n` may take while the others stay at `x`.
    pub fn candidates(&self, x: &[usize], n: usize) -> Vec<usize> {
        let home = self.cpv[n];
        let lo = home.saturating_sub(self.max_travel);
        let hi = (home + self.max_travel).min(self.grid_len - 1);
        (lo..=hi)
            .filter(|&m| {
                x.iter()
                    .enumerate()
                    .all(|(j, &xj)| j == n || m.abs_diff(xj) >= self.min_gap)
            })
            .collect()
    }

    /// Whether a whole index vector satisfies spacing, range and travel constraints.
    pub fn is_feasible(&self, x: &[usize]) -> bool {
        x.len() == self.cpv.len()
            && x.iter().zip(self.cpv).all(|(&m, &h)| m < self.grid_len && m.abs_diff(h) <= self.max_travel)
            && (0..x.len()).all(|i| (i + 1..x.len()).all(|j| x[i].abs_diff(x[j]) >= self.min_gap))
    }
}

/// Stopping rule and round cap of the sequential update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Stop once a round raises the objective by less than this fraction.
    pub tolerance: f64,
    pub max_rounds: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_rounds: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub dpv: Vec<usize>,
    pub value: f64,
    /// Objective at the start and after every single-antenna update.
    pub trace: Vec<f64>,
    pub rounds: usize,
    pub evaluations: usize,
    pub converged: bool,
}

// relative band inside which two objective values count as tied
const TIE: f64 = 1e-12;

/// Runs the sequential update from `start`, maximizing `objective`.
///
/// Ties are broken toward the candidate nearest the antenna's current
/// position, then toward the smaller coordinate. Non-finite objective
/// values mark a candidate as unusable.
pub fn sequential_update<F>(space: &SearchSpace<'_>, start: Vec<usize>, options: &SearchOptions, mut objective: F) -> SearchOutcome
where
    F: FnMut(&[usize]) -> f64,
{
    let mut x = start;
    let mut value = objective(&x);
    let mut evaluations = 1;
    let mut trace = vec![value];
    let mut rounds = 0;
    let mut converged = false;
    while rounds < options.max_rounds {
        rounds += 1;
        let round_start = value;
        for n in 0..x.len() {
            let home = space.cpv[n];
            let incumbent = x[n];
            let mut best = (value, incumbent);
            for m in space.candidates(&x, n) {
                if m == incumbent {
                    continue;
                }
                x[n] = m;
                let v = objective(&x);
                evaluations += 1;
                if !v.is_finite() {
                    continue;
                }
                let band = TIE * best.0.abs().max(f64::MIN_POSITIVE);
                let take = if !best.0.is_finite() || v > best.0 + band {
                    true
                } else if v >= best.0 - band {
                    (m.abs_diff(home), m) < (best.1.abs_diff(home), best.1)
                } else {
                    false
                };
                if take {
                    best = (v, m);
                }
            }
            x[n] = best.1;
            value = best.0;
            trace.push(value);
        }
        let gain = value - round_start;
        if gain <= options.tolerance * round_start.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    SearchOutcome {
        dpv: x,
        value,
        trace,
        rounds,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(cpv: &[usize]) -> SearchSpace<'_> {
        SearchSpace {
            cpv,
            grid_len: 20,
            min_gap: 3,
            max_travel: 5,
        }
    }

    #[test]
    fn candidates_respect_constraints() {
        let cpv = [4, 10];
        let s = space(&cpv);
        let c = s.candidates(&[4, 10], 0);
        assert_eq!(c, vec![0, 1, 2, 3, 4, 5, 6, 7]);
        let c = s.candidates(&[4, 10], 1);
        assert_eq!(c, vec![7, 8, 9, 10, 11, 12, 13, 14, 15]);
        assert!(s.is_feasible(&[4, 10]));
        assert!(!s.is_feasible(&[9, 10]));
        assert!(!s.is_feasible(&[4, 16]));
    }

    #[test]
    fn climbs_to_separable_optimum() {
        let cpv = [4, 10];
        let s = space(&cpv);
        let target = [1usize, 14];
        let out = sequential_update(&s, cpv.to_vec(), &SearchOptions::default(), |x| {
            -(x.iter().zip(&target).map(|(a, b)| a.abs_diff(*b).pow(2)).sum::<usize>() as f64)
        });
        assert_eq!(out.dpv, vec![1, 14]);
        assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(out.converged);
        assert!(out.evaluations <= 1 + out.rounds * 2 * 20);
    }

    #[test]
    fn flat_objective_keeps_incumbent() {
        let cpv = [4, 10];
        let s = space(&cpv);
        let out = sequential_update(&s, cpv.to_vec(), &SearchOptions::default(), |_| 1.0);
        assert_eq!(out.dpv, vec![4, 10]);
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn ties_prefer_home_then_smaller() {
        let cpv = [10];
        let s = SearchSpace {
            cpv: &cpv,
            grid_len: 20,
            min_gap: 1,
            max_travel: 5,
        };
        // both 8 and 12 are best, equally far from home
        let out = sequential_update(&s, vec![10], &SearchOptions::default(), |x| {
            if x[0] == 8 || x[0] == 12 {
                2.0
            } else {
                1.0
            }
        });
        assert_eq!(out.dpv, vec![8]);
    }
}
