//! Preset experiments behind each EE figure, plus the motor-curve table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{solve_with, Scheme};
use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Sweep, SweepAxis};
use crate::harness::experiment::{realization_seed, run_experiment, scheme_seed, ResultRow};
use crate::harness::output::{MotorCurvePoint, PositionRow};
use crate::motor::MotorParams;
use crate::problem::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 100 realizations on a reduced set of sweep values.
    #[default]
    Desk,
    /// 1000 realizations on the full set of sweep values.
    Full,
}

impl Scale {
    pub fn realizations(self) -> usize {
        match self {
            Scale::Desk => 100,
            Scale::Full => 1000,
        }
    }
}

const SU_SCHEMES: [Scheme; 5] = [Scheme::Proposed, Scheme::Pso, Scheme::ConvEe, Scheme::Sm, Scheme::Fpa];
const MU_SCHEMES: [Scheme; 6] = [Scheme::Proposed, Scheme::Pso, Scheme::ConvEe, Scheme::Sm, Scheme::Fpa, Scheme::Zf];

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
        Figure::Fig11,
        Figure::Fig12,
        Figure::Fig13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
            Figure::Fig12 => "fig12",
            Figure::Fig13 => "fig13",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Figure::Fig5 => "single user: EE versus normalized array length",
            Figure::Fig6 => "single user: optimized antenna positions in one realization",
            Figure::Fig7 => "single user: EE versus number of paths",
            Figure::Fig8 => "single user: EE versus coherence time",
            Figure::Fig9 => "single user: EE versus number of antennas",
            Figure::Fig10 => "two users: EE versus normalized array length",
            Figure::Fig11 => "two users: EE versus maximum transmit power",
            Figure::Fig12 => "two users: EE versus coherence time",
            Figure::Fig13 => "two users: EE versus number of antennas",
        }
    }

    pub fn num_users(self) -> usize {
        match self {
            Figure::Fig5 | Figure::Fig6 | Figure::Fig7 | Figure::Fig8 | Figure::Fig9 => 1,
            _ => 2,
        }
    }

    pub fn axis(self) -> SweepAxis {
        match self {
            Figure::Fig5 | Figure::Fig6 | Figure::Fig10 => SweepAxis::ArrayLengthOverLambda,
            Figure::Fig7 => SweepAxis::NumPaths,
            Figure::Fig8 | Figure::Fig12 => SweepAxis::CoherenceTime,
            Figure::Fig9 | Figure::Fig13 => SweepAxis::NumAntennas,
            Figure::Fig11 => SweepAxis::PMaxDbm,
        }
    }

    pub fn sweep_values(self, scale: Scale) -> Vec<f64> {
        let desk = scale == Scale::Desk;
        let v: &[f64] = match self.axis() {
            SweepAxis::ArrayLengthOverLambda if self == Figure::Fig6 => &[6.0],
            SweepAxis::ArrayLengthOverLambda if desk => &[3.0, 4.0, 6.0, 8.0],
            SweepAxis::ArrayLengthOverLambda => &[3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            SweepAxis::NumPaths if desk => &[1.0, 5.0, 10.0, 20.0],
            SweepAxis::NumPaths => &[1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0],
            SweepAxis::CoherenceTime if desk => &[0.05, 0.1, 0.25, 0.5],
            SweepAxis::CoherenceTime => &[0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5],
            SweepAxis::NumAntennas if desk => &[2.0, 4.0, 8.0, 12.0],
            SweepAxis::NumAntennas => &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            SweepAxis::PMaxDbm if desk => &[10.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            SweepAxis::PMaxDbm => &[5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
        };
        v.to_vec()
    }

    pub fn schemes(self) -> Vec<Scheme> {
        if self.num_users() == 1 {
            SU_SCHEMES.to_vec()
        } else {
            MU_SCHEMES.to_vec()
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        Figure::ALL.into_iter().find(|f| f.name() == key).ok_or_else(|| Error::Config {
            field: "figure".into(),
            reason: format!("unknown figure `{s}`, expected fig5 to fig13"),
        })
    }
}

/// Experiment behind `figure` at `scale`. The position snapshot uses one
/// realization at either scale.
pub fn figure_config(figure: Figure, scale: Scale) -> ExperimentConfig {
    ExperimentConfig {
        scenario: Scenario {
            num_users: figure.num_users(),
            ..Scenario::default()
        },
        schemes: figure.schemes(),
        sweep: Sweep {
            axis: figure.axis(),
            values: figure.sweep_values(scale),
        },
        realizations: if figure == Figure::Fig6 { 1 } else { scale.realizations() },
        ..ExperimentConfig::default()
    }
}

pub fn reproduce_figure(figure: Figure, scale: Scale) -> Result<Vec<ResultRow>> {
    run_experiment(&figure_config(figure, scale))
}

/// Current and destination positions of every scheme at the first sweep
/// point for realization `realization`.
pub fn optimized_positions(config: &ExperimentConfig, realization: usize) -> Result<Vec<PositionRow>> {
    config.validate()?;
    let seed = realization_seed(config.seed, config.sweep.axis, realization);
    let instance = Instance::from_seed(&config.scenario_at(config.sweep.values[0]), &config.motor, seed)?;
    let cpv = instance.array.cpv_positions();
    let mut rows = Vec::new();
    for &scheme in &config.schemes {
        let sol = solve_with(scheme, &instance, scheme_seed(seed), &config.settings)?;
        rows.extend(sol.dpv.iter().zip(&cpv).enumerate().map(|(antenna, (&dpv, &cpv))| PositionRow {
            scheme,
            antenna,
            cpv,
            dpv,
        }));
    }
    Ok(rows)
}

/// Torque and power sampled at `points` evenly spaced angular speeds from
/// standstill to the no-load speed.
pub fn motor_curves(motor: &MotorParams, points: usize) -> Result<Vec<MotorCurvePoint>> {
    if points < 2 {
        return Err(Error::Precondition("motor curves need at least two points".into()));
    }
    let omega_m = motor.max_no_load_speed()?;
    Ok((0..points)
        .map(|i| {
            let omega = omega_m * i as f64 / (points - 1) as f64;
            let torque = motor.pull_out_torque(omega);
            MotorCurvePoint {
                omega,
                speed: omega * motor.lead_radius,
                torque,
                power: omega * torque,
            }
        })
        .collect())
}
