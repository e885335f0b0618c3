//! A single optimization instance (scenario, motor, channel draw, array) and
//! the solution record every solver returns.

use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel, ArrayConfig, ChannelRealization, ResponseTable, Scenario};
use crate::error::{Error, Result};
use crate::kinematics::{check_collision_free, CollisionVerdict, MovePlan};
use crate::metrics::{energy_efficiency, transmit_power, ChannelMatrix, EEBreakdown, EnergyModel, Objective, Precoder};
use crate::motor::MotorParams;
use crate::search::SearchSpace;

/// Everything a solver needs about one channel realization.
#[derive(Debug, Clone)]
pub struct Instance {
    pub scenario: Scenario,
    pub motor: MotorParams,
    pub realization: ChannelRealization,
    pub array: ArrayConfig,
    pub table: ResponseTable,
    /// Minimum index gap between two antennas.
    pub min_gap: usize,
    /// Largest index distance an antenna may travel within `T` at `v_max`.
    pub max_travel: usize,
}

impl Instance {
    pub fn new(
        scenario: Scenario,
        motor: MotorParams,
        realization: ChannelRealization,
        array: ArrayConfig,
    ) -> Result<Self> {
        scenario.validate()?;
        motor.validate()?;
        if realization.num_users() != scenario.num_users {
            return Err(Error::Dimension(format!(
                "realization has {} users, scenario {}",
                realization.num_users(),
                scenario.num_users
            )));
        }
        if array.cpv.len() != scenario.num_antennas {
            return Err(Error::Dimension(format!(
                "array has {} antennas, scenario {}",
                array.cpv.len(),
                scenario.num_antennas
            )));
        }
        let min_gap = array.grid.steps_at_least(scenario.d_min).max(1);
        if array.cpv.windows(2).any(|w| w[1] < w[0] + min_gap) {
            return Err(Error::Precondition("current positions violate the minimum spacing".into()));
        }
        let max_travel = array
            .grid
            .steps_at_most(motor.v_max() * scenario.coherence_time)
            .min(array.grid.len);
        let table = ResponseTable::new(&realization, &array.grid);
        Ok(Self {
            scenario,
            motor,
            realization,
            array,
            table,
            min_gap,
            max_travel,
        })
    }

    /// Centred array plus a fresh channel draw from `seed`.
    pub fn from_seed(scenario: &Scenario, motor: &MotorParams, seed: u64) -> Result<Self> {
        let array = ArrayConfig::centered(scenario, motor)?;
        let realization = sample_channel(scenario, seed);
        Self::new(scenario.clone(), *motor, realization, array)
    }

    pub fn num_antennas(&self) -> usize {
        self.array.cpv.len()
    }

    pub fn num_users(&self) -> usize {
        self.scenario.num_users
    }

    pub fn step(&self) -> f64 {
        self.array.grid.step
    }

    pub fn positions(&self, dpv: &[usize]) -> Vec<f64> {
        dpv.iter().map(|&m| self.array.grid.position(m)).collect()
    }

    /// Channel matrix with antennas at grid indices `dpv`.
    pub fn channel(&self, dpv: &[usize]) -> ChannelMatrix {
        self.table.matrix(dpv)
    }

    /// Energy constants at the maximum speed.
    pub fn energy_model(&self, objective: Objective) -> EnergyModel {
        EnergyModel::new(&self.scenario, &self.motor, self.motor.v_max(), objective)
            .expect("v_max lies in the motor's speed range")
    }

    pub(crate) fn search_space(&self) -> SearchSpace<'_> {
        SearchSpace {
            cpv: &self.array.cpv,
            grid_len: self.array.grid.len,
            min_gap: self.min_gap,
            max_travel: self.max_travel,
        }
    }

    /// True block EE of `(dpv, w)` at the maximum speed.
    pub fn evaluate(&self, dpv: &[usize], w: &Precoder) -> Result<EEBreakdown> {
        energy_efficiency(
            &self.scenario,
            &self.motor,
            &self.array.cpv_positions(),
            &self.positions(dpv),
            self.motor.v_max(),
            w,
            &self.channel(dpv),
        )
    }

    /// Assembles a [`Solution`] at the maximum speed.
    pub fn solution(&self, dpv: Vec<usize>, precoder: Precoder, diagnostics: Diagnostics) -> Result<Solution> {
        let breakdown = self.evaluate(&dpv, &precoder)?;
        Ok(Solution {
            dpv: self.positions(&dpv),
            dpv_index: dpv,
            precoder,
            speed: self.motor.v_max(),
            breakdown,
            diagnostics,
        })
    }
}

/// Counters and traces recorded while solving.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Objective after every position update (or AO step for multi-user solvers).
    pub ee_trace: Vec<f64>,
    /// Dinkelbach ratio iterates of the last precoding solve.
    pub eta_trace: Vec<f64>,
    /// Sequential-update rounds, summed over all position searches.
    pub rounds: usize,
    /// Objective evaluations in position searches.
    pub evaluations: usize,
    pub dinkelbach_iterations: usize,
    /// Convex subproblems solved.
    pub subproblems: usize,
    pub newton_steps: usize,
    pub ao_iterations: usize,
    /// Largest KKT stationarity residual reported by a subproblem solve.
    pub kkt_residual: f64,
    /// `gamma_k - chi_k` at the last subproblem.
    pub sinr_slack_gap: Vec<f64>,
    pub converged: bool,
}

/// Output of any solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Destination positions (m).
    pub dpv: Vec<f64>,
    /// Destination grid indices.
    pub dpv_index: Vec<usize>,
    pub precoder: Precoder,
    /// Antenna speed (m/s).
    pub speed: f64,
    pub breakdown: EEBreakdown,
    pub diagnostics: Diagnostics,
}

/// Constraint-by-constraint feasibility of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub power_ok: bool,
    pub on_grid: bool,
    pub spacing_ok: bool,
    pub speed_ok: bool,
    pub trajectory: CollisionVerdict,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.power_ok && self.on_grid && self.spacing_ok && self.speed_ok && self.trajectory.is_ok()
    }
}

/// Checks power budget, grid membership, spacing, speed limits and the
/// collision-free trajectory for the configured movement threshold.
pub fn audit(instance: &Instance, solution: &Solution) -> FeasibilityReport {
    let s = &instance.scenario;
    let grid = &instance.array.grid;
    let power_ok = transmit_power(&solution.precoder) <= s.p_max * (1.0 + 1e-9);
    let on_grid = solution.dpv.len() == instance.num_antennas()
        && solution
            .dpv
            .iter()
            .zip(&solution.dpv_index)
            .all(|(&x, &m)| grid.index_of(x) == Some(m));
    let spacing_ok = {
        let mut idx = solution.dpv_index.clone();
        idx.sort_unstable();
        idx.windows(2).all(|w| w[1] >= w[0] + instance.min_gap)
    };
    let cpv = instance.array.cpv_positions();
    let max_move = cpv
        .iter()
        .zip(&solution.dpv)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let v = solution.speed;
    let speed_ok = v <= instance.motor.v_max() * (1.0 + 1e-12)
        && v * s.coherence_time >= max_move * (1.0 - 1e-12);
    let trajectory = match MovePlan::new(cpv, solution.dpv.clone(), v) {
        Ok(plan) => check_collision_free(&plan, s.d_th),
        Err(_) => CollisionVerdict::Violation {
            i: 0,
            j: 0,
            time: 0.0,
        },
    };
    FeasibilityReport {
        power_ok,
        on_grid,
        spacing_ok,
        speed_ok,
        trajectory,
    }
}
