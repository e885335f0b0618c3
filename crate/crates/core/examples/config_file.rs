//! Loads an experiment from a TOML file and reports what it resolved to.
//!
//! `cargo run --example config_file -- my_experiment.toml`

use ma_ee::harness::ExperimentConfig;

fn main() {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: config_file PATH");
        std::process::exit(2);
    };
    match ExperimentConfig::from_file(path.as_ref()) {
        Ok(c) => {
            println!("schemes      {:?}", c.schemes);
            println!("sweep        {} over {:?}", c.sweep.axis, c.sweep.values);
            println!("realizations {} (seed {})", c.realizations, c.seed);
            println!("P_max        {} W, noise {:e} W", c.scenario.p_max, c.scenario.noise_power);
            println!("rail         {} m with {} antennas, {} users", c.scenario.array_length, c.scenario.num_antennas, c.scenario.num_users);
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
}
