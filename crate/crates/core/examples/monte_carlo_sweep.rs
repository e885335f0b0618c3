//! A small paired Monte-Carlo sweep over the coherence time, written as CSV.
//!
//! `cargo run --release --example monte_carlo_sweep -- sweep.csv`

use ma_ee::baselines::Scheme;
use ma_ee::harness::{aggregate, paired_ee, results_to_csv, run_experiment_detailed, ExperimentConfig, Sweep, SweepAxis};

fn main() -> ma_ee::Result<()> {
    let config = ExperimentConfig::from_toml_str(
        r#"
        seed = 11
        realizations = 30
        schemes = ["proposed", "conv_ee", "fpa"]

        [scenario]
        num_users = 1

        [sweep]
        axis = "coherence_time"
        values = [0.05, 0.1, 0.25, 0.5]
        "#,
    )?;
    assert_eq!(config.sweep, Sweep { axis: SweepAxis::CoherenceTime, values: vec![0.05, 0.1, 0.25, 0.5] });

    let records = run_experiment_detailed(&config)?;
    let csv = results_to_csv(&aggregate(&records));
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, &csv).map_err(|e| ma_ee::Error::Io(e.to_string()))?,
        None => print!("{csv}"),
    }

    for &t in &config.sweep.values {
        let gap = paired_ee(&records, (t, Scheme::Proposed), (t, Scheme::ConvEe));
        println!("T = {t:>4}: proposed - conv_ee = {:.4} +/- {:.4}", gap.mean, gap.std_error);
    }
    Ok(())
}
