//! Experiment configuration read from TOML.
//!
//! Every section and key is optional; missing values fall back to the
//! default scenario. Powers are given in dBm (or dB for the reference path
//! loss) and lengths relative to the wavelength, and are converted to SI
//! units while parsing.
//!
//! ```toml
//! seed = 7
//! realizations = 100
//! schemes = ["proposed", "fpa"]
//!
//! [scenario]
//! num_users = 1
//! p_max_dbm = 30.0
//!
//! [sweep]
//! axis = "array_length_over_lambda"
//! values = [3, 4, 6, 8]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{Scheme, SolverSettings};
use crate::channel::{db_to_linear, dbm_to_watt, ArrayConfig, Scenario};
use crate::error::{Error, Result};
use crate::harness::output::Format;
use crate::motor::MotorParams;

fn config_error(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Scenario parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    ArrayLengthOverLambda,
    NumPaths,
    CoherenceTime,
    NumAntennas,
    #[serde(alias = "P_max_dBm")]
    PMaxDbm,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::ArrayLengthOverLambda,
        SweepAxis::NumPaths,
        SweepAxis::CoherenceTime,
        SweepAxis::NumAntennas,
        SweepAxis::PMaxDbm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ArrayLengthOverLambda => "array_length_over_lambda",
            SweepAxis::NumPaths => "num_paths",
            SweepAxis::CoherenceTime => "coherence_time",
            SweepAxis::NumAntennas => "num_antennas",
            SweepAxis::PMaxDbm => "p_max_dbm",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepAxis::NumPaths | SweepAxis::NumAntennas)
    }

    /// Value of this axis in `scenario`, in the axis' own units.
    pub fn value_of(self, scenario: &Scenario) -> f64 {
        match self {
            SweepAxis::ArrayLengthOverLambda => scenario.array_length / scenario.wavelength,
            SweepAxis::NumPaths => scenario.num_paths as f64,
            SweepAxis::CoherenceTime => scenario.coherence_time,
            SweepAxis::NumAntennas => scenario.num_antennas as f64,
            SweepAxis::PMaxDbm => 10.0 * scenario.p_max.log10() + 30.0,
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut s = base.clone();
        match self {
            SweepAxis::ArrayLengthOverLambda => s.array_length = value * s.wavelength,
            SweepAxis::NumPaths => s.num_paths = value as usize,
            SweepAxis::CoherenceTime => s.coherence_time = value,
            SweepAxis::NumAntennas => s.num_antennas = value as usize,
            SweepAxis::PMaxDbm => s.p_max = dbm_to_watt(value),
        }
        s
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| config_error("sweep.axis", format!("unknown axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Scenario at which the sweep axis is overridden.
    pub scenario: Scenario,
    pub motor: MotorParams,
    pub schemes: Vec<Scheme>,
    pub sweep: Sweep,
    pub realizations: usize,
    pub seed: u64,
    pub settings: SolverSettings,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let scenario = Scenario::default();
        let sweep = Sweep {
            axis: SweepAxis::ArrayLengthOverLambda,
            values: vec![SweepAxis::ArrayLengthOverLambda.value_of(&scenario)],
        };
        Self {
            scenario,
            motor: MotorParams::am2224(),
            schemes: Scheme::ALL.to_vec(),
            sweep,
            realizations: 100,
            seed: 0,
            settings: SolverSettings::default(),
            threads: None,
            output: None,
            format: Format::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_error("toml", e.message().to_string()))?;
        let config = raw.into_config()?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Scenario at one sweep value.
    pub fn scenario_at(&self, value: f64) -> Scenario {
        self.sweep.axis.apply(&self.scenario, value)
    }

    /// Checks every field, naming the offending one on failure.
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(config_error("realizations", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(config_error("schemes", "list is empty"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(config_error("schemes", format!("`{s}` listed twice")));
            }
        }
        if self.threads == Some(0) {
            return Err(config_error("threads", "must be at least 1"));
        }
        self.motor.validate().map_err(|e| nest("motor", e))?;
        self.scenario.validate().map_err(|e| nest("scenario", e))?;
        let values = &self.sweep.values;
        if values.is_empty() {
            return Err(config_error("sweep.values", "list is empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(config_error("sweep.values", format!("{v} is not finite")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_error("sweep.values", "must be strictly increasing"));
        }
        for &v in values {
            if self.sweep.axis.is_integer() && (v.fract() != 0.0 || v < 1.0) {
                return Err(config_error("sweep.values", format!("{} needs positive integers, got {v}", self.sweep.axis)));
            }
            let s = self.scenario_at(v);
            s.validate()
                .and_then(|_| ArrayConfig::centered(&s, &self.motor).map(drop))
                .map_err(|e| config_error("sweep.values", format!("{} = {v}: {e}", self.sweep.axis)))?;
        }
        Ok(())
    }
}

fn nest(section: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => config_error(format!("{section}.{field}"), reason),
        other => config_error(section, other.to_string()),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    realizations: Option<usize>,
    schemes: Option<Vec<String>>,
    threads: Option<usize>,
    #[serde(default)]
    scenario: RawScenario,
    #[serde(default)]
    motor: MotorParams,
    sweep: Option<RawSweep>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    search: Option<f64>,
    dinkelbach: Option<f64>,
    precoding: Option<f64>,
    sca: Option<f64>,
    ao: Option<f64>,
    wmmse: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawScenario {
    wavelength: f64,
    array_length_over_lambda: f64,
    num_antennas: usize,
    num_users: usize,
    num_paths: usize,
    pathloss_exponent: f64,
    ref_pathloss_db: f64,
    user_distance_m: (f64, f64),
    noise_power_dbm: f64,
    p_max_dbm: f64,
    static_power_dbm: f64,
    coherence_time: f64,
    d_min_over_lambda: f64,
    d_th_over_lambda: f64,
}

impl Default for RawScenario {
    fn default() -> Self {
        Self {
            wavelength: 0.06,
            array_length_over_lambda: 6.0,
            num_antennas: 6,
            num_users: 2,
            num_paths: 10,
            pathloss_exponent: 2.8,
            ref_pathloss_db: -40.0,
            user_distance_m: (20.0, 100.0),
            noise_power_dbm: -80.0,
            p_max_dbm: 30.0,
            static_power_dbm: 30.0,
            coherence_time: 0.25,
            d_min_over_lambda: 0.5,
            d_th_over_lambda: 0.5,
        }
    }
}

impl RawScenario {
    fn into_scenario(self) -> Scenario {
        Scenario {
            wavelength: self.wavelength,
            array_length: self.array_length_over_lambda * self.wavelength,
            num_antennas: self.num_antennas,
            num_users: self.num_users,
            num_paths: self.num_paths,
            pathloss_exponent: self.pathloss_exponent,
            ref_pathloss: db_to_linear(self.ref_pathloss_db),
            user_distance_range: self.user_distance_m,
            noise_power: dbm_to_watt(self.noise_power_dbm),
            p_max: dbm_to_watt(self.p_max_dbm),
            static_power: dbm_to_watt(self.static_power_dbm),
            coherence_time: self.coherence_time,
            d_min: self.d_min_over_lambda * self.wavelength,
            d_th: self.d_th_over_lambda * self.wavelength,
        }
    }
}

fn positive(field: &str, v: Option<f64>, slot: &mut f64) -> Result<()> {
    if let Some(v) = v {
        if !(v.is_finite() && v > 0.0) {
            return Err(config_error(format!("tolerances.{field}"), format!("must be positive, got {v}")));
        }
        *slot = v;
    }
    Ok(())
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        let defaults = ExperimentConfig::default();
        let scenario = self.scenario.into_scenario();
        let schemes = match self.schemes {
            Some(names) => names.iter().map(|n| n.parse()).collect::<Result<Vec<Scheme>>>()?,
            None => defaults.schemes,
        };
        let sweep = match self.sweep {
            Some(raw) => Sweep {
                axis: raw.axis.parse()?,
                values: raw.values,
            },
            None => Sweep {
                axis: SweepAxis::ArrayLengthOverLambda,
                values: vec![SweepAxis::ArrayLengthOverLambda.value_of(&scenario)],
            },
        };
        let mut settings = SolverSettings::default();
        let t = self.tolerances;
        positive("search", t.search, &mut settings.search.tolerance)?;
        positive("dinkelbach", t.dinkelbach, &mut settings.dinkelbach_tolerance)?;
        positive("precoding", t.precoding, &mut settings.precoding.outer_tolerance)?;
        positive("sca", t.sca, &mut settings.precoding.sca_tolerance)?;
        positive("ao", t.ao, &mut settings.ao_tolerance)?;
        settings.pso.ao_tolerance = settings.ao_tolerance;
        positive("wmmse", t.wmmse, &mut settings.wmmse.tolerance)?;
        let format = match self.output.format {
            Some(f) => f.parse().map_err(|_| config_error("output.format", format!("expected csv or json, got `{f}`")))?,
            None => Format::Csv,
        };
        Ok(ExperimentConfig {
            scenario,
            motor: self.motor,
            schemes,
            sweep,
            realizations: self.realizations.unwrap_or(defaults.realizations),
            seed: self.seed.unwrap_or(defaults.seed),
            settings,
            threads: self.threads,
            output: self.output.path,
            format,
        })
    }
}
