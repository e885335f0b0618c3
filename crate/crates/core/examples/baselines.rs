//! Every scheme on the same channel realizations.
//!
//! `cargo run --release --example baselines -- 2 20`

use ma_ee::baselines::{solve, Scheme};
use ma_ee::channel::Scenario;
use ma_ee::motor::MotorParams;
use ma_ee::problem::Instance;

fn main() -> ma_ee::Result<()> {
    let mut args = std::env::args().skip(1);
    let users = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let reps: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let scenario = Scenario {
        num_users: users,
        ..Scenario::default()
    };
    let motor = MotorParams::am2224();
    let mut totals = [(0.0, 0.0, 0.0); Scheme::ALL.len()];
    for seed in 0..reps {
        let inst = Instance::from_seed(&scenario, &motor, seed)?;
        for (slot, &scheme) in totals.iter_mut().zip(&Scheme::ALL) {
            let b = solve(scheme, &inst, seed)?.breakdown;
            slot.0 += b.ee;
            slot.1 += b.sum_rate;
            slot.2 += b.tau;
        }
    }
    let n = reps as f64;
    println!("K = {users}, {reps} realizations");
    println!("{:>9} {:>9} {:>10} {:>9}", "scheme", "EE", "rate", "tau (ms)");
    for (scheme, (ee, rate, tau)) in Scheme::ALL.iter().zip(totals) {
        println!("{:>9} {:>9.4} {:>10.3} {:>9.4}", scheme.name(), ee / n, rate / n, tau / n * 1e3);
    }
    Ok(())
}
