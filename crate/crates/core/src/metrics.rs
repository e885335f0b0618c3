//! SINR, achievable rates and the block energy-efficiency objective.
//!
//! A coherence block of length `T` starts with a movement stage of length
//! `tau` that only burns motor energy, followed by data transmission:
//!
//! ```text
//! EE = (T - tau) * sum_k R_k / ( P_M(v) * sum_n tau_n + (T - tau) * (Tr(W W^H) + P_s) )
//! ```
//!
//! Rates are in bits/s/Hz, so EE is reported in bits/Hz/Joule.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::kinematics::movement_delays;
use crate::motor::MotorParams;

/// Precoding matrix `W` (`N x K`), column `k` beamforms to user `k`.
pub type Precoder = DMatrix<Complex64>;

/// Channel matrix `H` (`N x K`), column `k` is `h_k`.
pub type ChannelMatrix = DMatrix<Complex64>;

/// Radiated power `Tr(W W^H)`.
pub fn transmit_power(w: &Precoder) -> f64 {
    w.iter().map(|c| c.norm_sqr()).sum()
}

/// `h_k^H w_i` for every user pair; entry `(k, i)`.
pub fn cross_gains(h: &ChannelMatrix, w: &Precoder) -> DMatrix<Complex64> {
    h.adjoint() * w
}

/// SINR of user `k`.
pub fn sinr(h: &ChannelMatrix, w: &Precoder, sigma2: f64, k: usize) -> f64 {
    let hk = h.column(k);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for i in 0..w.ncols() {
        let c = hk.dotc(&w.column(i)).norm_sqr();
        if i == k {
            signal = c;
        } else {
            interference += c;
        }
    }
    signal / (interference + sigma2)
}

/// `sum_k log2(1 + gamma_k)`.
pub fn sum_rate(h: &ChannelMatrix, w: &Precoder, sigma2: f64) -> f64 {
    sum_rate_from_gains(&cross_gains(h, w), sigma2)
}

pub(crate) fn sum_rate_from_gains(g: &DMatrix<Complex64>, sigma2: f64) -> f64 {
    let k_users = g.nrows();
    (0..k_users)
        .map(|k| {
            let mut signal = 0.0;
            let mut interference = sigma2;
            for i in 0..g.ncols() {
                let c = g[(k, i)].norm_sqr();
                if i == k {
                    signal = c;
                } else {
                    interference += c;
                }
            }
            (1.0 + signal / interference).log2()
        })
        .sum()
}

/// EE that ignores movement: `sum_k R_k / (Tr(W W^H) + P_s)`.
pub fn asymptotic_ee(h: &ChannelMatrix, w: &Precoder, sigma2: f64, static_power: f64) -> f64 {
    sum_rate(h, w, sigma2) / (transmit_power(w) + static_power)
}

/// Full energy accounting of one coherence block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EEBreakdown {
    /// bits/s/Hz
    pub sum_rate: f64,
    /// Movement stage length (s).
    pub tau: f64,
    /// Sum of per-antenna movement delays (s).
    pub total_delay: f64,
    /// Motor energy (J).
    pub e_motor: f64,
    /// Transmission-stage energy (J).
    pub e_transmit: f64,
    /// bits/Hz/J
    pub ee: f64,
}

/// Block energy efficiency of a complete operating point.
#[allow(clippy::too_many_arguments)]
pub fn energy_efficiency(
    scenario: &Scenario,
    motor: &MotorParams,
    cpv: &[f64],
    dpv: &[f64],
    speed: f64,
    w: &Precoder,
    h: &ChannelMatrix,
) -> Result<EEBreakdown> {
    if h.nrows() != dpv.len() || w.nrows() != dpv.len() || h.ncols() != w.ncols() {
        return Err(Error::Dimension(format!(
            "H is {}x{}, W is {}x{}, {} antennas",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols(),
            dpv.len()
        )));
    }
    let p_motor = motor.motor_power(speed)?;
    let (delays, tau) = movement_delays(cpv, dpv, speed)?;
    let t = scenario.coherence_time;
    // tolerance absorbs the rounding in max|dx| / T <= v
    if tau > t * (1.0 + 1e-12) {
        let distance = delays.iter().copied().fold(0.0, f64::max) * speed;
        return Err(Error::InfeasibleSpeed {
            speed,
            distance,
            coherence_time: t,
        });
    }
    let tau = tau.min(t);
    let total_delay: f64 = delays.iter().sum();
    let rate = sum_rate(h, w, scenario.noise_power);
    let e_motor = p_motor * total_delay;
    let e_transmit = (t - tau) * (transmit_power(w) + scenario.static_power);
    Ok(EEBreakdown {
        sum_rate: rate,
        tau,
        total_delay,
        e_motor,
        e_transmit,
        ee: (t - tau) * rate / (e_motor + e_transmit),
    })
}

/// Which energy accounting an optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Motor energy and movement delay included.
    Block,
    /// Movement ignored entirely (conventional EE).
    Conventional,
}

/// Energy constants at a fixed antenna speed, for fast repeated evaluation
/// inside the optimizers. Travel distances are in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub coherence_time: f64,
    pub static_power: f64,
    pub speed: f64,
    /// `P_M(speed)`, or 0 for [`Objective::Conventional`].
    pub motor_power: f64,
    pub objective: Objective,
}

impl EnergyModel {
    pub fn new(scenario: &Scenario, motor: &MotorParams, speed: f64, objective: Objective) -> Result<Self> {
        let motor_power = match objective {
            Objective::Block => motor.motor_power(speed)?,
            Objective::Conventional => 0.0,
        };
        Ok(Self {
            coherence_time: scenario.coherence_time,
            static_power: scenario.static_power,
            speed,
            motor_power,
            objective,
        })
    }

    /// Fractional-program constants `(a, b)`: `EE = a R / (a P + b)` with
    /// `a = T - tau` and `b = a P_s + P_M sum_n tau_n`.
    pub fn fractional_terms(&self, total_travel: f64, max_travel: f64) -> (f64, f64) {
        match self.objective {
            Objective::Block => {
                let a = (self.coherence_time - max_travel / self.speed).max(0.0);
                (a, a * self.static_power + self.motor_power * total_travel / self.speed)
            }
            Objective::Conventional => (self.coherence_time, self.coherence_time * self.static_power),
        }
    }

    pub fn ee(&self, sum_rate: f64, tx_power: f64, total_travel: f64, max_travel: f64) -> f64 {
        let (a, b) = self.fractional_terms(total_travel, max_travel);
        let den = a * tx_power + b;
        if den > 0.0 {
            a * sum_rate / den
        } else {
            0.0
        }
    }
}

/// Total and maximum travel (m) between two index vectors on a grid of step `step`.
pub(crate) fn travel(cpv: &[usize], dpv: &[usize], step: f64) -> (f64, f64) {
    let mut total = 0usize;
    let mut max = 0usize;
    for (&a, &b) in cpv.iter().zip(dpv) {
        let d = a.abs_diff(b);
        total += d;
        max = max.max(d);
    }
    (total as f64 * step, max as f64 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_user_sinr_is_snr() {
        let h = DMatrix::from_column_slice(2, 1, &[c(1.0, 0.5), c(-0.3, 0.2)]);
        let w = DMatrix::from_column_slice(2, 1, &[c(0.2, 0.1), c(0.4, -0.7)]);
        let s = sinr(&h, &w, 0.1, 0);
        let hw = h[(0, 0)].conj() * w[(0, 0)] + h[(1, 0)].conj() * w[(1, 0)];
        assert_relative_eq!(s, hw.norm_sqr() / 0.1, max_relative = 1e-14);
    }

    #[test]
    fn orthogonal_beams_remove_interference() {
        let h = DMatrix::from_column_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let w = DMatrix::from_column_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        assert_relative_eq!(sinr(&h, &w, 1.0, 0), 4.0);
        assert_relative_eq!(sinr(&h, &w, 1.0, 1), 9.0);
    }

    #[test]
    fn zero_precoder_zero_rate() {
        let h = DMatrix::from_element(3, 2, c(1.0, 1.0));
        let w = DMatrix::zeros(3, 2);
        assert_eq!(sum_rate(&h, &w, 1e-3), 0.0);
        assert_eq!(asymptotic_ee(&h, &w, 1e-3, 1.0), 0.0);
    }

    #[test]
    fn unit_sinr_gives_one_bit_per_user() {
        // each user: |h^H w|^2 = 1, no leakage, sigma^2 = 1
        let h = DMatrix::from_column_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let w = h.clone();
        assert_relative_eq!(sum_rate(&h, &w, 1.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn static_plan_reduces_to_conventional_ee() {
        let s = Scenario {
            num_users: 1,
            num_antennas: 2,
            ..Scenario::default()
        };
        let m = MotorParams::am2224();
        let h = DMatrix::from_column_slice(2, 1, &[c(3e-5, 1e-5), c(-2e-5, 0.5e-5)]);
        let w = DMatrix::from_column_slice(2, 1, &[c(0.3, 0.0), c(0.1, 0.2)]);
        let x = [0.1, 0.2];
        for v in [0.5, 2.76] {
            let b = energy_efficiency(&s, &m, &x, &x, v, &w, &h).unwrap();
            assert_eq!(b.e_motor, 0.0);
            assert_relative_eq!(b.ee, asymptotic_ee(&h, &w, s.noise_power, s.static_power), max_relative = 1e-14);
        }
        assert!(matches!(
            energy_efficiency(&s, &m, &x, &x, 3.0, &w, &h),
            Err(Error::SpeedOutOfRange { .. })
        ));
    }

    #[test]
    fn too_slow_is_rejected() {
        let s = Scenario {
            num_users: 1,
            num_antennas: 1,
            ..Scenario::default()
        };
        let h = DMatrix::from_element(1, 1, c(1e-5, 0.0));
        let w = DMatrix::from_element(1, 1, c(1.0, 0.0));
        let r = energy_efficiency(&s, &MotorParams::am2224(), &[0.0], &[0.3], 1.0, &w, &h);
        assert!(matches!(r, Err(Error::InfeasibleSpeed { .. })));
    }

    #[test]
    fn energy_model_matches_breakdown() {
        let s = Scenario {
            num_users: 1,
            num_antennas: 2,
            ..Scenario::default()
        };
        let m = MotorParams::am2224();
        let h = DMatrix::from_column_slice(2, 1, &[c(3e-5, 1e-5), c(-2e-5, 0.5e-5)]);
        let w = DMatrix::from_column_slice(2, 1, &[c(0.3, 0.0), c(0.1, 0.2)]);
        let cpv = [0.1, 0.2];
        let dpv = [0.05, 0.26];
        let b = energy_efficiency(&s, &m, &cpv, &dpv, m.v_max(), &w, &h).unwrap();
        let model = EnergyModel::new(&s, &m, m.v_max(), Objective::Block).unwrap();
        let ee = model.ee(b.sum_rate, transmit_power(&w), 0.11, 0.06);
        assert_relative_eq!(ee, b.ee, max_relative = 1e-12);
        let conv = EnergyModel::new(&s, &m, m.v_max(), Objective::Conventional).unwrap();
        assert_relative_eq!(
            conv.ee(b.sum_rate, transmit_power(&w), 0.11, 0.06),
            b.sum_rate / (transmit_power(&w) + s.static_power),
            max_relative = 1e-14
        );
    }

    #[test]
    fn travel_counts_steps() {
        let (total, max) = travel(&[10, 40], &[12, 35], 0.5);
        assert_eq!(total, 3.5);
        assert_eq!(max, 2.5);
    }
}
