//! Single-user EE maximization against fixed antennas.
//!
//! `cargo run --release --example single_user -- 8`

use ma_ee::baselines::fpa_solve;
use ma_ee::channel::Scenario;
use ma_ee::motor::MotorParams;
use ma_ee::problem::{audit, Instance};
use ma_ee::su::su_solve;

fn main() -> ma_ee::Result<()> {
    let a_over_lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6.0);
    let scenario = Scenario {
        num_users: 1,
        array_length: a_over_lambda * 0.06,
        ..Scenario::default()
    };
    let motor = MotorParams::am2224();
    println!("{:>4} {:>9} {:>9} {:>8} {:>9} {:>6}", "seed", "EE", "EE(FPA)", "P (W)", "tau (ms)", "rounds");
    for seed in 0..8 {
        let inst = Instance::from_seed(&scenario, &motor, seed)?;
        let sol = su_solve(&inst)?;
        let fpa = fpa_solve(&inst)?;
        assert!(audit(&inst, &sol).is_feasible());
        println!(
            "{seed:>4} {:>9.4} {:>9.4} {:>8.4} {:>9.4} {:>6}",
            sol.breakdown.ee,
            fpa.breakdown.ee,
            sol.breakdown.e_transmit / (scenario.coherence_time - sol.breakdown.tau),
            sol.breakdown.tau * 1e3,
            sol.diagnostics.rounds
        );
    }
    Ok(())
}
