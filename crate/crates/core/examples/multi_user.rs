//! Two-user alternating optimization: SCA precoding inside Dinkelbach,
//! then a position update at the fixed precoder.
//!
//! `cargo run --release --example multi_user -- 3`

use ma_ee::channel::Scenario;
use ma_ee::motor::MotorParams;
use ma_ee::mu::mu_solve;
use ma_ee::problem::{audit, Instance};

fn main() -> ma_ee::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let inst = Instance::from_seed(&Scenario::default(), &MotorParams::am2224(), seed)?;
    let sol = mu_solve(&inst)?;
    let d = &sol.diagnostics;

    println!("EE trace (after each block):");
    for (i, ee) in d.ee_trace.iter().enumerate() {
        println!("  {i:>2}: {ee:.6}");
    }
    println!("cpv {:?}", inst.array.cpv);
    println!("dpv {:?}", sol.dpv_index);
    println!(
        "sum rate {:.3} bit/s/Hz, tau {:.3} ms, motor energy {:.3e} J",
        sol.breakdown.sum_rate,
        sol.breakdown.tau * 1e3,
        sol.breakdown.e_motor
    );
    println!(
        "{} AO iterations, {} subproblems, {} Newton steps, KKT residual {:.1e}, SINR slack {:?}",
        d.ao_iterations, d.subproblems, d.newton_steps, d.kkt_residual, d.sinr_slack_gap
    );
    println!("feasible: {:?}", audit(&inst, &sol));
    Ok(())
}
