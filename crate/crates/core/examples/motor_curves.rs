//! Pull-out torque and mechanical power of the AM2224 stepper motor.
//!
//! `cargo run --example motor_curves`

use ma_ee::harness::motor_curves;
use ma_ee::motor::MotorParams;

fn main() -> ma_ee::Result<()> {
    let motor = MotorParams::am2224();
    let omega_m = motor.max_no_load_speed()?;
    println!("no-load speed {omega_m:.4} rad/s ({:.4} m/s at the lead screw)", omega_m * motor.lead_radius);
    println!("speed cap {:.3} m/s, step {:.4} mm", motor.v_max(), motor.step_size() * 1e3);

    let curve = motor_curves(&motor, 13)?;
    println!("{:>10} {:>8} {:>12} {:>10}", "omega", "v", "torque", "power");
    for p in &curve {
        println!("{:>10.2} {:>8.3} {:>12.6} {:>10.4}", p.omega, p.speed, p.torque, p.power);
    }
    let peak = curve.iter().max_by(|a, b| a.power.total_cmp(&b.power)).unwrap();
    println!("power peaks near {:.2} m/s", peak.speed);
    Ok(())
}
