//! Configuration, Monte-Carlo runs, figure presets and result files.

pub mod config;
pub mod experiment;
pub mod figures;
pub mod output;
pub mod selftest;

pub use config::{ExperimentConfig, Sweep, SweepAxis};
pub use experiment::{
    aggregate, ee_samples, paired_ee, realization_seed, run_experiment, run_experiment_detailed, scheme_seed,
    PairedDifference, RealizationRecord, ResultRow,
};
pub use figures::{figure_config, motor_curves, optimized_positions, reproduce_figure, Figure, Scale};
pub use output::{
    emit_results, motor_curves_to_csv, parse_results_csv, parse_results_json, positions_to_csv, records_to_csv,
    render_results, results_to_csv, results_to_json, Format, MotorCurvePoint, PositionRow,
};
pub use selftest::{selftest, Check};
