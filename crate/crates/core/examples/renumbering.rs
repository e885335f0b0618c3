//! Destination swapping: sorting the destinations keeps the antenna order,
//! never lengthens the movement and removes collisions.
//!
//! `cargo run --example renumbering`

use ma_ee::kinematics::{check_collision_free, min_total_delay_oracle, movement_delays, renumber_sorted, MovePlan};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> ma_ee::Result<()> {
    let cpv = vec![0.10, 0.13, 0.16, 0.19];
    let dpv = vec![0.20, 0.05, 0.14, 0.28];
    let speed = 2.76;
    let d_th = 0.03;

    let w = DMatrix::from_fn(4, 1, |n, _| Complex64::new(n as f64, 0.0));
    let (sorted, rows, perm) = renumber_sorted(&dpv, &w)?;
    println!("destinations {dpv:?} -> {sorted:?} (permutation {perm:?})");
    println!("precoder rows follow their antennas: {:?}", rows.column(0).iter().map(|c| c.re).collect::<Vec<_>>());

    for (label, d) in [("as given", &dpv), ("sorted", &sorted)] {
        let (delays, tau) = movement_delays(&cpv, d, speed)?;
        let verdict = check_collision_free(&MovePlan::new(cpv.clone(), d.clone(), speed)?, d_th);
        println!(
            "{label:>8}: total delay {:.4} ms, tau {:.4} ms, {verdict:?}",
            delays.iter().sum::<f64>() * 1e3,
            tau * 1e3
        );
    }
    let (_, best) = min_total_delay_oracle(&cpv, &dpv, speed)?;
    println!("best over all 24 assignments: {:.4} ms", best * 1e3);
    Ok(())
}
