//! Draws a field-response channel and shows how the gain of one antenna
//! varies along the rail.
//!
//! `cargo run --example channel_sampling -- 42`

use ma_ee::channel::{sample_channel, ArrayConfig, Scenario};
use ma_ee::motor::MotorParams;

fn main() -> ma_ee::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let scenario = Scenario::default();
    let motor = MotorParams::am2224();
    let array = ArrayConfig::centered(&scenario, &motor)?;
    let channel = sample_channel(&scenario, seed);

    println!("grid: {} points of {:.4} mm, cpv indices {:?}", array.grid.len, array.grid.step * 1e3, array.cpv);
    for (k, user) in channel.users.iter().enumerate() {
        println!("user {k}: {:.1} m, {} paths", user.distance, user.angles.len());
    }

    let h = channel.channel_matrix(&array.cpv_positions())?;
    println!("|h_k| at the current positions: {:.3e}, {:.3e}", h.column(0).norm(), h.column(1).norm());

    let stride = array.grid.len / 20;
    println!("{:>9} {:>12}", "x (mm)", "|h_0(x)|^2");
    for m in (0..array.grid.len).step_by(stride) {
        let x = array.grid.position(m);
        println!("{:>9.2} {:>12.4e}", x * 1e3, channel.response(0, x).norm_sqr());
    }
    Ok(())
}
