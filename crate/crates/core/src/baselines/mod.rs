//! Comparison schemes: fixed antennas, movement-blind EE, sum-rate
//! maximization, particle-swarm placement and zero-forcing precoding.

mod conv_ee;
mod fpa;
mod pso;
mod sm;
mod zf;

pub use conv_ee::{conv_ee_solve, conv_ee_solve_with};
pub use fpa::{fpa_solve, fpa_solve_with};
pub use pso::{pso_position_solve, pso_position_solve_with, PsoOptions};
pub use sm::{sm_solve, sm_solve_with, wmmse, WmmseOptions, WmmseOutcome};
pub use zf::{zf_directions, zf_power, zf_solve, zf_solve_with, ZfPower};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Objective;
use crate::mu::{mu_solve_with, MuOptions, PrecodingOptions};
use crate::problem::{Instance, Solution};
use crate::search::SearchOptions;
use crate::su::{su_position_search, SuOptions};

/// Every scheme the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    Pso,
    ConvEe,
    Sm,
    Fpa,
    Zf,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Proposed,
        Scheme::Pso,
        Scheme::ConvEe,
        Scheme::Sm,
        Scheme::Fpa,
        Scheme::Zf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Pso => "pso",
            Scheme::ConvEe => "conv_ee",
            Scheme::Sm => "sm",
            Scheme::Fpa => "fpa",
            Scheme::Zf => "zf",
        }
    }

    /// Whether the scheme moves antennas at all.
    pub fn is_movable(self) -> bool {
        self != Scheme::Fpa
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config {
                field: "schemes".into(),
                reason: format!("unknown scheme `{s}`"),
            })
    }
}

/// Tolerances and iteration caps shared by every scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub search: SearchOptions,
    pub dinkelbach_tolerance: f64,
    pub precoding: PrecodingOptions,
    pub max_ao: usize,
    pub ao_tolerance: f64,
    pub wmmse: WmmseOptions,
    pub pso: PsoOptions,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let su = SuOptions::default();
        let mu = MuOptions::default();
        Self {
            search: su.search,
            dinkelbach_tolerance: su.dinkelbach_tolerance,
            precoding: mu.precoding,
            max_ao: mu.max_ao,
            ao_tolerance: mu.ao_tolerance,
            wmmse: WmmseOptions::default(),
            pso: PsoOptions::default(),
        }
    }
}

impl SolverSettings {
    pub fn su(&self, objective: Objective) -> SuOptions {
        SuOptions {
            objective,
            search: self.search,
            dinkelbach_tolerance: self.dinkelbach_tolerance,
        }
    }

    pub fn mu(&self, objective: Objective) -> MuOptions {
        MuOptions {
            objective,
            precoding: self.precoding,
            search: self.search,
            max_ao: self.max_ao,
            ao_tolerance: self.ao_tolerance,
        }
    }
}

/// The proposed method: single-user or multi-user solver depending on `K`.
pub fn proposed_solve(instance: &Instance) -> Result<Solution> {
    proposed_solve_with(instance, &SolverSettings::default())
}

pub fn proposed_solve_with(instance: &Instance, settings: &SolverSettings) -> Result<Solution> {
    if instance.num_users() == 1 {
        su_position_search(instance, &settings.su(Objective::Block))
    } else {
        mu_solve_with(instance, &settings.mu(Objective::Block))
    }
}

/// Runs `scheme` on `instance`; `seed` drives the only randomized scheme (PSO).
pub fn solve(scheme: Scheme, instance: &Instance, seed: u64) -> Result<Solution> {
    solve_with(scheme, instance, seed, &SolverSettings::default())
}

pub fn solve_with(scheme: Scheme, instance: &Instance, seed: u64, settings: &SolverSettings) -> Result<Solution> {
    match scheme {
        Scheme::Proposed => proposed_solve_with(instance, settings),
        Scheme::Fpa => fpa_solve_with(instance, settings),
        Scheme::ConvEe => conv_ee_solve_with(instance, settings),
        Scheme::Sm => sm_solve_with(instance, settings),
        Scheme::Pso => {
            let su = settings.su(Objective::Block);
            pso_position_solve_with(instance, &settings.pso, seed, &su, &settings.precoding)
        }
        Scheme::Zf => zf_solve_with(instance, settings),
    }
}
