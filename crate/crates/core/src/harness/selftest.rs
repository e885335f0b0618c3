//! Quick end-to-end checks run by the `selftest` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::fpa_solve;
use crate::baselines::proposed_solve;
use crate::channel::Scenario;
use crate::kinematics::{min_total_delay_oracle, movement_delays};
use crate::motor::MotorParams;
use crate::problem::{audit, Instance};
use crate::su::{dinkelbach_power, DinkelbachContext};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn motor_check() -> Check {
    let m = MotorParams::am2224();
    let root = m.no_load_speed_bisection(600.0, 1e-12);
    let decreasing = (1..=552).all(|w| m.pull_out_torque(w as f64) < m.pull_out_torque(w as f64 - 1.0));
    match root {
        Ok(w) => check(
            "motor no-load speed",
            decreasing && (580.0..=585.0).contains(&w),
            format!("omega_M = {w:.6} rad/s, torque decreasing on [0, 552]: {decreasing}"),
        ),
        Err(e) => check("motor no-load speed", false, e.to_string()),
    }
}

fn renumbering_check(rng: &mut ChaCha8Rng) -> Check {
    let trials = 300;
    let mut bad = 0;
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let mut cpv: Vec<f64> = (0..n).map(|i| i as f64 * 0.03 + 0.1).collect();
        cpv.iter_mut().for_each(|x| *x += rng.random_range(0.0..0.001));
        let dpv: Vec<f64> = (0..n).map(|i| 0.03 * i as f64 + rng.random_range(0.0..0.2)).collect();
        let mut sorted = dpv.clone();
        sorted.sort_by(f64::total_cmp);
        let ok = match (movement_delays(&cpv, &sorted, 1.0), min_total_delay_oracle(&cpv, &dpv, 1.0)) {
            (Ok((d, _)), Ok((_, best))) => (d.iter().sum::<f64>() - best).abs() <= 1e-12 * best.max(1e-12),
            _ => false,
        };
        bad += usize::from(!ok);
    }
    check("sorted renumbering is delay-optimal", bad == 0, format!("{bad} of {trials} instances off the oracle"))
}

fn dinkelbach_check(rng: &mut ChaCha8Rng) -> Check {
    let trials = 300;
    let mut bad = 0;
    for _ in 0..trials {
        let ctx = DinkelbachContext {
            a: rng.random_range(0.05..0.25),
            b: rng.random_range(1e-3..1.0),
            channel_gain: 10f64.powf(rng.random_range(-12.0..-6.0)),
            sigma2: 1e-11,
            p_max: 1.0,
            tolerance: 1e-6,
        };
        let out = dinkelbach_power(&ctx);
        let monotone = out.trace.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        bad += usize::from(!(monotone && out.converged && out.iterations < 50));
    }
    check("Dinkelbach ratio is monotone", bad == 0, format!("{bad} of {trials} traces failed"))
}

fn solver_check(users: usize) -> Check {
    let name = if users == 1 { "single-user solver" } else { "two-user solver" };
    let motor = MotorParams::am2224();
    let s = Scenario {
        num_users: users,
        ..Scenario::default()
    };
    let mut notes = Vec::new();
    for seed in 0..5 {
        let result = Instance::from_seed(&s, &motor, seed).and_then(|inst| {
            let sol = proposed_solve(&inst)?;
            let fpa = fpa_solve(&inst)?;
            Ok((audit(&inst, &sol).is_feasible(), sol, fpa))
        });
        match result {
            Ok((feasible, sol, fpa)) => {
                let monotone = sol.diagnostics.ee_trace.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
                let beats = sol.breakdown.ee >= fpa.breakdown.ee * (1.0 - 1e-9);
                let kkt = sol.diagnostics.kkt_residual < 1e-7;
                if !(feasible && monotone && beats && kkt) {
                    notes.push(format!(
                        "seed {seed}: feasible {feasible}, monotone {monotone}, >= FPA {beats}, kkt {:.2e}",
                        sol.diagnostics.kkt_residual
                    ));
                }
            }
            Err(e) => notes.push(format!("seed {seed}: {e}")),
        }
    }
    let detail = if notes.is_empty() { "5 realizations feasible, monotone and above FPA".into() } else { notes.join("; ") };
    check(name, notes.is_empty(), detail)
}

/// Runs every check; deterministic.
pub fn selftest() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    vec![
        motor_check(),
        renumbering_check(&mut rng),
        dinkelbach_check(&mut rng),
        solver_check(1),
        solver_check(2),
    ]
}
