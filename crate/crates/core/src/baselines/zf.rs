use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::baselines::SolverSettings;
use crate::error::{Error, Result};
use crate::metrics::{travel, ChannelMatrix, Objective, Precoder};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::search::sequential_update;

// smallest accepted eigenvalue ratio of H^H H
const RANK_TOL: f64 = 1e-12;

/// Unit-norm columns of `H (H^H H)^{-1}`.
pub fn zf_directions(h: &ChannelMatrix) -> Result<Precoder> {
    let (n, k) = h.shape();
    if k > n {
        return Err(Error::RankDeficient);
    }
    let gram = h.adjoint() * h;
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(hi > 0.0) || lo <= RANK_TOL * hi {
        return Err(Error::RankDeficient);
    }
    let inv = gram.try_inverse().ok_or(Error::RankDeficient)?;
    let mut d = h * inv;
    for mut col in d.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::from(norm);
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZfPower {
    pub powers: Vec<f64>,
    pub eta: f64,
    pub iterations: usize,
}

/// Water-filling level `1 / (lambda ln 2)` with `lambda >= eta` meeting the
/// power budget.
fn water_fill(gains: &[f64], sigma2: f64, p_max: f64, eta: f64) -> Vec<f64> {
    let fill = |lambda: f64| -> Vec<f64> {
        gains
            .iter()
            .map(|&g| (1.0 / (lambda * LN_2) - sigma2 / g).max(0.0))
            .collect()
    };
    if eta > 0.0 {
        let p = fill(eta);
        if p.iter().sum::<f64>() <= p_max {
            return p;
        }
    }
    let mut lo = eta;
    let mut hi = gains.len() as f64 / (p_max * LN_2);
    if hi <= lo {
        return fill(lo.max(hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fill(mid).iter().sum::<f64>() > p_max {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    fill(hi)
}

/// Dinkelbach power allocation over the interference-free ZF links with
/// effective gains `|h_k^H d_k|^2`.
pub fn zf_power(gains: &[f64], a: f64, b: f64, sigma2: f64, p_max: f64, tolerance: f64) -> ZfPower {
    let k = gains.len();
    let ratio = |p: &[f64]| -> f64 {
        let rate: f64 = p.iter().zip(gains).map(|(&p, &g)| (1.0 + p * g / sigma2).log2()).sum();
        a * rate / (a * p.iter().sum::<f64>() + b)
    };
    if a <= 0.0 || gains.iter().any(|&g| !(g > 0.0)) {
        return ZfPower {
            powers: vec![0.0; k],
            eta: 0.0,
            iterations: 0,
        };
    }
    let mut eta = 0.0;
    let mut powers = vec![0.0; k];
    let mut iterations = 0;
    while iterations < 100 {
        iterations += 1;
        let p = water_fill(gains, sigma2, p_max, eta);
        let next = ratio(&p);
        if next < eta {
            break;
        }
        powers = p;
        let done = (next - eta).abs() <= tolerance * next;
        eta = next;
        if done {
            break;
        }
    }
    ZfPower {
        powers,
        eta,
        iterations,
    }
}

fn zf_at(instance: &Instance, dpv: &[usize]) -> Result<(Precoder, ZfPower)> {
    let h = instance.channel(dpv);
    let d = zf_directions(&h)?;
    let gains: Vec<f64> = (0..h.ncols()).map(|k| h.column(k).dotc(&d.column(k)).norm_sqr()).collect();
    let model = instance.energy_model(Objective::Block);
    let (total, max) = travel(&instance.array.cpv, dpv, instance.step());
    let (a, b) = model.fractional_terms(total, max);
    let s = &instance.scenario;
    let power = zf_power(&gains, a, b, s.noise_power, s.p_max, 1e-10);
    Ok((d, power))
}

/// Zero-forcing directions with Dinkelbach power allocation, positions by
/// sequential update. Rank-deficient candidate positions are skipped.
pub fn zf_solve(instance: &Instance) -> Result<Solution> {
    zf_solve_with(instance, &SolverSettings::default())
}

pub fn zf_solve_with(instance: &Instance, settings: &SolverSettings) -> Result<Solution> {
    let space = instance.search_space();
    let out = sequential_update(&space, instance.array.cpv.clone(), &settings.search, |x| {
        zf_at(instance, x).map_or(f64::NEG_INFINITY, |(_, p)| p.eta)
    });
    let mut dpv = out.dpv;
    dpv.sort_unstable();
    let (d, power) = zf_at(instance, &dpv)?;
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        power.powers.len(),
        power.powers.iter().map(|p| Complex64::from(p.sqrt())),
    ));
    let diag = Diagnostics {
        ee_trace: out.trace,
        rounds: out.rounds,
        evaluations: out.evaluations,
        dinkelbach_iterations: power.iterations,
        converged: out.converged,
        ..Diagnostics::default()
    };
    instance.solution(dpv, d * scale, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Scenario;
    use crate::motor::MotorParams;
    use crate::problem::audit;
    use crate::su::mrt_direction;

    #[test]
    fn directions_null_other_users() {
        let inst = Instance::from_seed(&Scenario::default(), &MotorParams::am2224(), 5).unwrap();
        let h = inst.channel(&inst.array.cpv);
        let d = zf_directions(&h).unwrap();
        for k in 0..2 {
            assert!((d.column(k).norm() - 1.0).abs() < 1e-12);
            for i in (0..2).filter(|&i| i != k) {
                let leak = h.column(k).dotc(&d.column(i)).norm();
                assert!(leak < 1e-10 * h.column(k).norm() * d.column(i).norm());
            }
        }
    }

    #[test]
    fn single_column_is_mrt() {
        let h = DMatrix::from_column_slice(3, 1, &[Complex64::new(1.0, 2.0), Complex64::new(0.5, -1.0), Complex64::new(0.0, 0.3)]);
        let d = zf_directions(&h).unwrap();
        let m = mrt_direction(&h.column(0).into_owned()).unwrap();
        assert!((d.column(0) - m).norm() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let col = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let h = DMatrix::from_fn(2, 2, |n, _| col[n]);
        assert_eq!(zf_directions(&h), Err(Error::RankDeficient));
        assert_eq!(zf_directions(&DMatrix::zeros(1, 2)), Err(Error::RankDeficient));
    }

    #[test]
    fn power_respects_budget_and_single_user_matches_closed_form() {
        let p = zf_power(&[1e-8, 3e-9], 0.25, 0.25, 1e-11, 1.0, 1e-12);
        assert!(p.powers.iter().sum::<f64>() <= 1.0 + 1e-9);
        let single = zf_power(&[1e-8], 0.25, 0.25, 1e-11, 1.0, 1e-12);
        let closed = crate::su::dinkelbach_power(&crate::su::DinkelbachContext {
            a: 0.25,
            b: 0.25,
            channel_gain: 1e-8,
            sigma2: 1e-11,
            p_max: 1.0,
            tolerance: 1e-12,
        });
        assert!((single.eta - closed.eta).abs() < 1e-9 * closed.eta);
    }

    #[test]
    fn solution_is_feasible() {
        let inst = Instance::from_seed(&Scenario::default(), &MotorParams::am2224(), 8).unwrap();
        let sol = zf_solve(&inst).unwrap();
        assert!(audit(&inst, &sol).is_feasible());
        assert!(sol.diagnostics.ee_trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
