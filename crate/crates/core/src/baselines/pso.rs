use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinematics::sort_permutation;
use crate::metrics::{sum_rate_from_gains, transmit_power, Objective, Precoder};
use crate::mu::{absorb, model_ee, mrt_init, precode_at, sort_with_rows, PrecodingOptions};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::su::{dinkelbach_power, mrt_precoder, su_power, DinkelbachContext, SuOptions};

/// Global-best particle swarm settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoOptions {
    /// Swarm size is this times `N`.
    pub particles_per_antenna: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of the array length.
    pub velocity_clamp: f64,
    /// Fitness deducted per violated spacing pair or travel limit.
    pub penalty: f64,
    pub max_ao: usize,
    pub ao_tolerance: f64,
}

impl Default for PsoOptions {
    fn default() -> Self {
        Self {
            particles_per_antenna: 8,
            iterations: 100,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            velocity_clamp: 0.2,
            penalty: 1e3,
            max_ao: 20,
            ao_tolerance: 1e-4,
        }
    }
}

struct Swarm<'a> {
    instance: &'a Instance,
    options: &'a PsoOptions,
    home: Vec<f64>,
    reach: f64,
    upper: f64,
}

impl Swarm<'_> {
    fn violations(&self, x: &[f64]) -> usize {
        let d_min = self.instance.scenario.d_min * (1.0 - 1e-9);
        let spacing = (0..x.len())
            .map(|i| (i + 1..x.len()).filter(|&j| (x[i] - x[j]).abs() < d_min).count())
            .sum::<usize>();
        let travel = x
            .iter()
            .zip(&self.home)
            .filter(|(a, b)| (*a - *b).abs() > self.reach * (1.0 + 1e-12))
            .count();
        spacing + travel
    }

    /// Best position found, starting the swarm from `start` plus random particles.
    fn run(&self, start: &[f64], rng: &mut ChaCha8Rng, ee: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
        let n = start.len();
        let size = (self.options.particles_per_antenna * n).max(1);
        let vmax = self.options.velocity_clamp * self.instance.scenario.array_length;
        let fitness = |x: &[f64]| ee(x) - self.options.penalty * self.violations(x) as f64;
        let mut pos: Vec<Vec<f64>> = Vec::with_capacity(size);
        pos.push(start.to_vec());
        while pos.len() < size {
            pos.push(
                self.home
                    .iter()
                    .map(|&h| rng.random_range((h - self.reach).max(0.0)..=(h + self.reach).min(self.upper)))
                    .collect(),
            );
        }
        let mut vel: Vec<Vec<f64>> = (0..size)
            .map(|_| (0..n).map(|_| rng.random_range(-vmax..=vmax)).collect())
            .collect();
        let mut best = pos.clone();
        let mut best_fit: Vec<f64> = pos.iter().map(|x| fitness(x)).collect();
        let mut g = 0;
        for i in 1..size {
            if best_fit[i] > best_fit[g] {
                g = i;
            }
        }
        let mut global = best[g].clone();
        let mut global_fit = best_fit[g];
        for _ in 0..self.options.iterations {
            for i in 0..size {
                for d in 0..n {
                    let r1: f64 = rng.random();
                    let r2: f64 = rng.random();
                    let v = self.options.inertia * vel[i][d]
                        + self.options.cognitive * r1 * (best[i][d] - pos[i][d])
                        + self.options.social * r2 * (global[d] - pos[i][d]);
                    vel[i][d] = v.clamp(-vmax, vmax);
                    pos[i][d] = (pos[i][d] + vel[i][d]).clamp(0.0, self.upper);
                }
                let f = fitness(&pos[i]);
                if f > best_fit[i] {
                    best_fit[i] = f;
                    best[i].clone_from(&pos[i]);
                    if f > global_fit {
                        global_fit = f;
                        global.clone_from(&pos[i]);
                    }
                }
            }
        }
        global
    }
}

/// Rounds to the grid, clamps travel and pushes crowded antennas apart.
fn quantize_repair(instance: &Instance, x: &[f64]) -> Option<Vec<usize>> {
    let grid = &instance.array.grid;
    let last = grid.len - 1;
    let gap = instance.min_gap;
    let mut idx: Vec<usize> = x
        .iter()
        .zip(&instance.array.cpv)
        .map(|(&p, &h)| {
            let m = ((p / grid.step).round().max(0.0) as usize).min(last);
            m.clamp(h.saturating_sub(instance.max_travel), (h + instance.max_travel).min(last))
        })
        .collect();
    let q = sort_permutation(&idx);
    for j in 1..q.len() {
        let floor = idx[q[j - 1]] + gap;
        if idx[q[j]] < floor {
            idx[q[j]] = floor;
        }
    }
    if let Some(&top) = q.last() {
        if idx[top] > last {
            idx[top] = last;
            for j in (0..q.len() - 1).rev() {
                let ceiling = idx[q[j + 1]].checked_sub(gap)?;
                idx[q[j]] = idx[q[j]].min(ceiling);
            }
        }
    }
    instance.search_space().is_feasible(&idx).then_some(idx)
}

fn continuous_channel(instance: &Instance, x: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(x.len(), instance.num_users(), |n, k| instance.realization.response(k, x[n]))
}

fn continuous_travel(home: &[f64], x: &[f64]) -> (f64, f64) {
    let d = x.iter().zip(home).map(|(a, b)| (a - b).abs());
    d.fold((0.0, 0.0), |(t, m), v| (t + v, f64::max(m, v)))
}

/// Particle-swarm placement in continuous coordinates, quantized to the
/// grid and repaired afterwards. A single user gets Dinkelbach power with
/// MRT per particle; several users alternate precoding and a swarm over the
/// positions at the fixed precoder. A quantized result that is infeasible or
/// worse than the swarm's starting point is discarded.
pub fn pso_position_solve(instance: &Instance, options: &PsoOptions, seed: u64) -> Result<Solution> {
    pso_position_solve_with(instance, options, seed, &SuOptions::default(), &PrecodingOptions::default())
}

/// [`pso_position_solve`] with explicit inner power-control and precoding tolerances.
pub fn pso_position_solve_with(
    instance: &Instance,
    options: &PsoOptions,
    seed: u64,
    su: &SuOptions,
    precoding: &PrecodingOptions,
) -> Result<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = &instance.scenario;
    let model = instance.energy_model(Objective::Block);
    let swarm = Swarm {
        instance,
        options,
        home: instance.array.cpv_positions(),
        reach: instance.max_travel as f64 * instance.step(),
        upper: instance.array.grid.position(instance.array.grid.len - 1),
    };
    let cpv = instance.array.cpv.clone();
    let mut diag = Diagnostics::default();

    if instance.num_users() == 1 {
        let ee = |x: &[f64]| {
            let gain: f64 = x.iter().map(|&p| instance.realization.response(0, p).norm_sqr()).sum();
            let (total, max) = continuous_travel(&swarm.home, x);
            let (a, b) = model.fractional_terms(total, max);
            if a <= 0.0 {
                return 0.0;
            }
            dinkelbach_power(&DinkelbachContext {
                a,
                b,
                channel_gain: gain,
                sigma2: s.noise_power,
                p_max: s.p_max,
                tolerance: su.dinkelbach_tolerance,
            })
            .eta
        };
        let best = swarm.run(&swarm.home, &mut rng, &ee);
        let start_ee = su_power(instance, &cpv, su).eta;
        diag.ee_trace.push(start_ee);
        let mut dpv = match quantize_repair(instance, &best) {
            Some(d) if su_power(instance, &d, su).eta >= start_ee => d,
            _ => cpv,
        };
        dpv.sort_unstable();
        let power = su_power(instance, &dpv, su);
        diag.ee_trace.push(power.eta);
        diag.eta_trace = power.trace;
        diag.dinkelbach_iterations = power.iterations;
        diag.converged = true;
        let w = mrt_precoder(instance, &dpv, power.power)?;
        return instance.solution(dpv, w, diag);
    }

    let mut x = cpv;
    let mut w: Precoder = mrt_init(&instance.channel(&x), s.p_max);
    let mut ee = model_ee(instance, &model, &x, &w);
    diag.ee_trace.push(ee);
    for _ in 0..options.max_ao {
        diag.ao_iterations += 1;
        let p = precode_at(instance, &x, &w, Objective::Block, precoding)?;
        absorb(&mut diag, &p);
        w = p.w;
        let current = model_ee(instance, &model, &x, &w);
        diag.ee_trace.push(current);
        let fixed = |xc: &[f64]| {
            let g = continuous_channel(instance, xc).adjoint() * &w;
            let (total, max) = continuous_travel(&swarm.home, xc);
            model.ee(sum_rate_from_gains(&g, s.noise_power), transmit_power(&w), total, max)
        };
        let start = instance.positions(&x);
        let best = swarm.run(&start, &mut rng, &fixed);
        if let Some(d) = quantize_repair(instance, &best) {
            if model_ee(instance, &model, &d, &w) >= current {
                x = d;
            }
        }
        (x, w) = sort_with_rows(&x, &w);
        let next = model_ee(instance, &model, &x, &w);
        diag.ee_trace.push(next);
        let done = (next - ee).abs() <= options.ao_tolerance * ee.abs();
        ee = next;
        if done {
            diag.converged = true;
            break;
        }
    }
    instance.solution(x, w, diag)
}
