//! Field-response multipath channels for a linear movable-antenna array.
//!
//! Each user sees `num_paths` far-field paths leaving the array at angles
//! `theta_l` with complex gains `g_l`. The response of an antenna element
//! at coordinate `x` (m) is
//!
//! ```text
//! h(x) = sum_l g_l * exp(j * 2*pi/lambda * x * sin(theta_l))
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::motor::MotorParams;

/// Converts a power in dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power ratio in dB to a linear gain.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Physical scenario of one downlink block. All quantities are linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Carrier wavelength (m).
    pub wavelength: f64,
    /// Length of the antenna rail `A` (m).
    pub array_length: f64,
    pub num_antennas: usize,
    pub num_users: usize,
    pub num_paths: usize,
    pub pathloss_exponent: f64,
    /// Path loss at the 1 m reference distance (linear power gain).
    pub ref_pathloss: f64,
    /// Users are dropped uniformly within this distance range (m).
    pub user_distance_range: (f64, f64),
    /// Noise power at each user (W).
    pub noise_power: f64,
    /// Transmit power budget (W).
    pub p_max: f64,
    /// Static circuit power (W).
    pub static_power: f64,
    /// Channel coherence time `T` (s).
    pub coherence_time: f64,
    /// Minimum inter-antenna spacing at rest (m).
    pub d_min: f64,
    /// Minimum inter-antenna distance during movement (m).
    pub d_th: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let wavelength = 0.06;
        Self {
            wavelength,
            array_length: 6.0 * wavelength,
            num_antennas: 6,
            num_users: 2,
            num_paths: 10,
            pathloss_exponent: 2.8,
            ref_pathloss: db_to_linear(-40.0),
            user_distance_range: (20.0, 100.0),
            noise_power: dbm_to_watt(-80.0),
            p_max: dbm_to_watt(30.0),
            static_power: dbm_to_watt(30.0),
            coherence_time: 0.25,
            d_min: wavelength / 2.0,
            d_th: wavelength / 2.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("array_length", self.array_length),
            ("pathloss_exponent", self.pathloss_exponent),
            ("ref_pathloss", self.ref_pathloss),
            ("noise_power", self.noise_power),
            ("p_max", self.p_max),
            ("static_power", self.static_power),
            ("coherence_time", self.coherence_time),
            ("d_min", self.d_min),
            ("d_th", self.d_th),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be finite and positive, got {value}")));
            }
        }
        if self.num_antennas == 0 {
            return Err(invalid("num_antennas", "must be at least 1"));
        }
        if self.num_users == 0 {
            return Err(invalid("num_users", "must be at least 1"));
        }
        if self.num_paths == 0 {
            return Err(invalid("num_paths", "must be at least 1"));
        }
        let (lo, hi) = self.user_distance_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(invalid("user_distance_range", format!("need 0 < min <= max, got ({lo}, {hi})")));
        }
        if self.d_th < self.d_min {
            return Err(invalid("d_th", "must be at least d_min"));
        }
        if self.num_antennas as f64 * self.d_min > self.array_length * (1.0 + 1e-12) {
            return Err(invalid(
                "num_antennas",
                format!(
                    "{} antennas spaced {} m do not fit on a {} m rail",
                    self.num_antennas, self.d_min, self.array_length
                ),
            ));
        }
        Ok(())
    }

    /// Mean per-path power `rho * d^-alpha / L_p` at distance `d`.
    pub fn path_power(&self, distance: f64) -> f64 {
        self.ref_pathloss * distance.powf(-self.pathloss_exponent) / self.num_paths as f64
    }
}

/// Uniform grid of candidate antenna positions `{0, d_s, ..., (M-1) d_s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid {
    pub step: f64,
    pub len: usize,
}

impl CandidateGrid {
    pub fn position(&self, index: usize) -> f64 {
        index as f64 * self.step
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len).map(|m| self.position(m)).collect()
    }

    /// Grid index of `x`, if `x` lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = x / self.step;
        let m = r.round();
        if m < 0.0 || (r - m).abs() > 1e-6 || m as usize >= self.len {
            return None;
        }
        Some(m as usize)
    }

    /// Smallest index gap whose physical distance reaches `distance`.
    pub fn steps_at_least(&self, distance: f64) -> usize {
        (distance / self.step - 1e-9).ceil().max(0.0) as usize
    }

    /// Largest index gap whose physical distance stays within `distance`.
    pub fn steps_at_most(&self, distance: f64) -> usize {
        (distance / self.step + 1e-9).floor().max(0.0) as usize
    }
}

/// Discretizes the rail into `M = floor(A / d_s)` candidate points.
pub fn candidate_grid(scenario: &Scenario, step: f64) -> Result<CandidateGrid> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("must be positive, got {step}")));
    }
    // the tolerance keeps A = k * d_s from flooring to k - 1
    let len = (scenario.array_length / step * (1.0 + 1e-12)).floor() as usize;
    if len == 0 {
        return Err(Error::EmptyGrid {
            array_length: scenario.array_length,
            step,
        });
    }
    Ok(CandidateGrid { step, len })
}

/// Candidate grid plus the current antenna positions (CPV), stored as grid indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub grid: CandidateGrid,
    pub cpv: Vec<usize>,
}

impl ArrayConfig {
    /// Antennas centred on the grid with the smallest on-grid spacing that
    /// is at least half a wavelength and at least `d_min`.
    pub fn centered(scenario: &Scenario, motor: &MotorParams) -> Result<Self> {
        scenario.validate()?;
        let grid = candidate_grid(scenario, motor.step_size())?;
        let n = scenario.num_antennas;
        let gap = grid
            .steps_at_least(scenario.wavelength / 2.0)
            .max(grid.steps_at_least(scenario.d_min))
            .max(1);
        let span = (n - 1) * gap;
        if span >= grid.len {
            return Err(invalid(
                "num_antennas",
                format!("{n} antennas need {} grid points, grid has {}", span + 1, grid.len),
            ));
        }
        let start = (grid.len - 1 - span).div_ceil(2);
        let cpv = (0..n).map(|i| start + i * gap).collect();
        Ok(Self { grid, cpv })
    }

    /// Uses caller-supplied positions (m), which must sit on the grid in increasing order.
    pub fn with_positions(scenario: &Scenario, motor: &MotorParams, positions: &[f64]) -> Result<Self> {
        scenario.validate()?;
        let grid = candidate_grid(scenario, motor.step_size())?;
        if positions.len() != scenario.num_antennas {
            return Err(Error::Dimension(format!(
                "{} positions for {} antennas",
                positions.len(),
                scenario.num_antennas
            )));
        }
        let cpv = positions
            .iter()
            .map(|&x| grid.index_of(x).ok_or(Error::OffGrid { position: x }))
            .collect::<Result<Vec<_>>>()?;
        if cpv.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("current positions must be strictly increasing".into()));
        }
        Ok(Self { grid, cpv })
    }

    pub fn cpv_positions(&self) -> Vec<f64> {
        self.cpv.iter().map(|&m| self.grid.position(m)).collect()
    }
}

/// Multipath parameters of one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserChannel {
    pub distance: f64,
    pub angles: Vec<f64>,
    pub gains: Vec<Complex64>,
}

/// One random draw of every user's multipath channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub seed: u64,
    pub wavelength: f64,
    pub array_length: f64,
    pub users: Vec<UserChannel>,
}

/// Draws user distances, departure angles and CSCG path gains from `seed`.
pub fn sample_channel(scenario: &Scenario, seed: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d_lo, d_hi) = scenario.user_distance_range;
    let angle = Uniform::new_inclusive(-PI / 2.0, PI / 2.0).expect("finite bounds");
    let users = (0..scenario.num_users)
        .map(|_| {
            let distance = if d_hi > d_lo { rng.random_range(d_lo..=d_hi) } else { d_lo };
            let sd = (scenario.path_power(distance) / 2.0).sqrt();
            let normal = Normal::new(0.0, sd).expect("finite deviation");
            let angles = (0..scenario.num_paths).map(|_| angle.sample(&mut rng)).collect();
            let gains = (0..scenario.num_paths)
                .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect();
            UserChannel {
                distance,
                angles,
                gains,
            }
        })
        .collect();
    ChannelRealization {
        seed,
        wavelength: scenario.wavelength,
        array_length: scenario.array_length,
        users,
    }
}

impl ChannelRealization {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// Field response of user `k` at coordinate `x`, without range checks.
    pub fn response(&self, k: usize, x: f64) -> Complex64 {
        let kw = 2.0 * PI / self.wavelength;
        let user = &self.users[k];
        user.angles
            .iter()
            .zip(&user.gains)
            .map(|(&theta, &g)| g * Complex64::from_polar(1.0, kw * x * theta.sin()))
            .sum()
    }

    /// Channel vector `h_k(x)` of user `k` for antennas at `positions`.
    pub fn channel_vector(&self, positions: &[f64], k: usize) -> Result<DVector<Complex64>> {
        if k >= self.users.len() {
            return Err(Error::Dimension(format!("user {k} of {}", self.users.len())));
        }
        self.check_positions(positions)?;
        Ok(DVector::from_iterator(
            positions.len(),
            positions.iter().map(|&x| self.response(k, x)),
        ))
    }

    /// `N x K` matrix whose column `k` is `h_k(x)`.
    pub fn channel_matrix(&self, positions: &[f64]) -> Result<DMatrix<Complex64>> {
        self.check_positions(positions)?;
        Ok(DMatrix::from_fn(positions.len(), self.users.len(), |n, k| {
            self.response(k, positions[n])
        }))
    }

    fn check_positions(&self, positions: &[f64]) -> Result<()> {
        let tol = 1e-12 * self.array_length;
        match positions
            .iter()
            .find(|&&x| !(x >= -tol && x <= self.array_length + tol))
        {
            Some(&x) => Err(Error::PositionOutOfRange {
                position: x,
                array_length: self.array_length,
            }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Precomputed responses of every user at every grid point.
#[derive(Debug, Clone)]
pub struct ResponseTable {
    // row-major: [k * len + m]
    values: Vec<Complex64>,
    len: usize,
    users: usize,
}

impl ResponseTable {
    pub fn new(realization: &ChannelRealization, grid: &CandidateGrid) -> Self {
        let users = realization.num_users();
        let mut values = Vec::with_capacity(users * grid.len);
        for k in 0..users {
            values.extend((0..grid.len).map(|m| realization.response(k, grid.position(m))));
        }
        Self {
            values,
            len: grid.len,
            users,
        }
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.values[k * self.len + m]
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// `N x K` channel matrix for antennas at grid indices `dpv`.
    pub fn matrix(&self, dpv: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(dpv.len(), self.users, |n, k| self.get(k, dpv[n]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_grid_has_275_points() {
        let s = Scenario::default();
        let g = candidate_grid(&s, MotorParams::am2224().step_size()).unwrap();
        assert_eq!(g.len, 275);
        let g = candidate_grid(&s, 1.309e-3).unwrap();
        assert_eq!(g.len, 275);
    }

    #[test]
    fn rail_of_one_step_has_one_point() {
        let s = Scenario {
            array_length: 1.309e-3,
            ..Scenario::default()
        };
        let g = candidate_grid(&s, 1.309e-3).unwrap();
        assert_eq!(g.len, 1);
        assert_eq!(g.positions(), vec![0.0]);
        assert!(matches!(candidate_grid(&s, 2e-3), Err(Error::EmptyGrid { .. })));
        assert!(candidate_grid(&s, 0.0).is_err());
    }

    #[test]
    fn grid_spacing_is_uniform() {
        let s = Scenario::default();
        let g = candidate_grid(&s, MotorParams::am2224().step_size()).unwrap();
        let p = g.positions();
        for w in p.windows(2) {
            assert!((w[1] - w[0] - g.step).abs() < 1e-15);
        }
    }

    #[test]
    fn centered_cpv_is_symmetric_and_spaced() {
        let s = Scenario::default();
        let m = MotorParams::am2224();
        let arr = ArrayConfig::centered(&s, &m).unwrap();
        assert_eq!(arr.cpv.len(), 6);
        // 0.03 / 1.309e-3 = 22.9 -> 23 steps
        for w in arr.cpv.windows(2) {
            assert_eq!(w[1] - w[0], 23);
            assert!(arr.grid.position(w[1]) - arr.grid.position(w[0]) >= s.d_min);
        }
        let left = arr.cpv[0];
        let right = arr.grid.len - 1 - arr.cpv[5];
        assert!(left.abs_diff(right) <= 1);
    }

    #[test]
    fn too_many_antennas_rejected() {
        let s = Scenario {
            num_antennas: 13,
            ..Scenario::default()
        };
        assert!(ArrayConfig::centered(&s, &MotorParams::am2224()).is_err());
    }

    #[test]
    fn same_seed_same_realization() {
        let s = Scenario::default();
        assert_eq!(sample_channel(&s, 7), sample_channel(&s, 7));
        assert_ne!(sample_channel(&s, 7), sample_channel(&s, 8));
    }

    #[test]
    fn single_path_has_one_gain() {
        let s = Scenario {
            num_paths: 1,
            ..Scenario::default()
        };
        let r = sample_channel(&s, 3);
        for u in &r.users {
            assert_eq!(u.gains.len(), 1);
            assert_eq!(u.angles.len(), 1);
            assert!(u.angles[0].abs() <= PI / 2.0);
            assert!(u.distance >= 20.0 && u.distance <= 100.0);
        }
    }

    #[test]
    fn zero_position_returns_gain_sum() {
        let s = Scenario {
            num_paths: 1,
            ..Scenario::default()
        };
        let r = sample_channel(&s, 11);
        let h = r.channel_vector(&[0.0], 0).unwrap();
        assert_eq!(h[0], r.users[0].gains[0]);
    }

    #[test]
    fn single_path_magnitude_is_constant() {
        let s = Scenario {
            num_paths: 1,
            ..Scenario::default()
        };
        let r = sample_channel(&s, 5);
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.007).collect();
        let h = r.channel_vector(&xs, 1).unwrap();
        let g = r.users[1].gains[0].norm();
        for v in h.iter() {
            assert_relative_eq!(v.norm(), g, max_relative = 1e-12);
        }
    }

    #[test]
    fn opposing_paths_cancel() {
        // Two equal-gain paths at +-30 deg: phases oppose where
        // 2*pi/lambda * x * (sin 30 - sin(-30)) = pi, i.e. x = lambda / 2.
        let lambda = 0.06;
        let r = ChannelRealization {
            seed: 0,
            wavelength: lambda,
            array_length: 0.36,
            users: vec![UserChannel {
                distance: 50.0,
                angles: vec![PI / 6.0, -PI / 6.0],
                gains: vec![Complex64::new(1.0, 0.0); 2],
            }],
        };
        let h = r.channel_vector(&[lambda / 2.0, 0.0], 0).unwrap();
        assert!(h[0].norm() < 1e-12);
        assert_relative_eq!(h[1].norm(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn out_of_range_positions_rejected() {
        let r = sample_channel(&Scenario::default(), 1);
        assert!(matches!(r.channel_vector(&[0.4], 0), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(r.channel_vector(&[-0.01], 0), Err(Error::PositionOutOfRange { .. })));
        assert!(r.channel_vector(&[0.0], 5).is_err());
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let s = Scenario::default();
        let m = MotorParams::am2224();
        let arr = ArrayConfig::centered(&s, &m).unwrap();
        let r = sample_channel(&s, 9);
        let t = ResponseTable::new(&r, &arr.grid);
        let h = r.channel_matrix(&arr.cpv_positions()).unwrap();
        assert_eq!(t.matrix(&arr.cpv), h);
    }

    #[test]
    fn json_dump_round_trips() {
        let r = sample_channel(&Scenario::default(), 42);
        let back = ChannelRealization::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn unit_conversions() {
        assert_relative_eq!(dbm_to_watt(30.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watt(-80.0), 1e-11, max_relative = 1e-12);
        assert_relative_eq!(db_to_linear(-40.0), 1e-4, max_relative = 1e-12);
    }
}
