//! Stepper-motor characteristics for a lead-screw driven antenna.
//!
//! The pull-out torque of a permanent-magnet stepper motor falls with
//! angular speed because of back-EMF and winding reactance:
//!
//! ```text
//! M(w) = p*psi*V / sqrt(R^2 + w^2 L^2)  -  p*w*psi^2*R / (R^2 + w^2 L^2)
//! ```
//!
//! The mechanical power needed to move an antenna at linear speed `v`
//! through a lead screw of radius `l0` is `P(v) = (v / l0) * M(v / l0)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Electrical and mechanical constants of one stepper motor and its lead screw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotorParams {
    /// Number of rotor teeth `p`.
    pub rotor_teeth: u32,
    /// Peak magnet flux linking each winding (Wb).
    pub flux: f64,
    /// Supply voltage (V).
    pub voltage: f64,
    /// Phase resistance (ohm).
    pub resistance: f64,
    /// Phase inductance (H).
    pub inductance: f64,
    /// Lead-screw outer radius (m).
    pub lead_radius: f64,
    /// Step angle (rad).
    pub step_angle: f64,
    /// Largest angular speed the loaded motor is allowed to run at (rad/s).
    pub omega_max: f64,
}

impl Default for MotorParams {
    fn default() -> Self {
        Self::am2224()
    }
}

impl MotorParams {
    /// Validates and builds a parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rotor_teeth: u32,
        flux: f64,
        voltage: f64,
        resistance: f64,
        inductance: f64,
        lead_radius: f64,
        step_angle: f64,
        omega_max: f64,
    ) -> Result<Self> {
        let params = Self {
            rotor_teeth,
            flux,
            voltage,
            resistance,
            inductance,
            lead_radius,
            step_angle,
            omega_max,
        };
        params.validate()?;
        Ok(params)
    }

    /// AM2224 high-speed stepper with a 5 mm lead screw.
    pub fn am2224() -> Self {
        Self {
            rotor_teeth: 6,
            flux: 0.023,
            voltage: 11.94,
            resistance: 75.0,
            inductance: 65.6e-3,
            lead_radius: 5e-3,
            step_angle: std::f64::consts::PI / 12.0,
            omega_max: 552.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rotor_teeth == 0 {
            return Err(invalid("rotor_teeth", "must be positive"));
        }
        let positive = [
            ("flux", self.flux),
            ("voltage", self.voltage),
            ("resistance", self.resistance),
            ("inductance", self.inductance),
            ("lead_radius", self.lead_radius),
            ("step_angle", self.step_angle),
            ("omega_max", self.omega_max),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be finite and positive, got {value}")));
            }
        }
        let omega_m = self.max_no_load_speed()?;
        if self.omega_max >= omega_m {
            return Err(invalid(
                "omega_max",
                format!("must stay below the no-load speed {omega_m:.4} rad/s"),
            ));
        }
        Ok(())
    }

    /// Pull-out torque (N*m) at angular speed `omega` (rad/s).
    ///
    /// Total on `omega >= 0`; turns negative past the no-load speed.
    pub fn pull_out_torque(&self, omega: f64) -> f64 {
        let p = f64::from(self.rotor_teeth);
        let z2 = self.resistance.powi(2) + (omega * self.inductance).powi(2);
        p * self.flux * self.voltage / z2.sqrt() - p * omega * self.flux.powi(2) * self.resistance / z2
    }

    /// Analytic derivative of [`Self::pull_out_torque`] with respect to `omega`.
    pub fn torque_slope(&self, omega: f64) -> f64 {
        let p = f64::from(self.rotor_teeth);
        let r2 = self.resistance.powi(2);
        let l2 = self.inductance.powi(2);
        let z2 = r2 + omega * omega * l2;
        -p * self.flux * self.voltage * omega * l2 / z2.powf(1.5)
            - p * self.flux.powi(2) * self.resistance * (r2 - omega * omega * l2) / (z2 * z2)
    }

    /// Largest linear antenna speed `omega_max * l0` (m/s).
    pub fn v_max(&self) -> f64 {
        self.omega_max * self.lead_radius
    }

    /// Linear distance covered by one motor step, `step_angle * l0` (m).
    pub fn step_size(&self) -> f64 {
        self.step_angle * self.lead_radius
    }

    /// Mechanical power (W) drawn while moving the antenna at `v` m/s.
    pub fn motor_power(&self, v: f64) -> Result<f64> {
        let v_max = self.v_max();
        if !(0.0..=v_max).contains(&v) {
            return Err(Error::SpeedOutOfRange { speed: v, v_max });
        }
        Ok(self.power_unchecked(v))
    }

    pub(crate) fn power_unchecked(&self, v: f64) -> f64 {
        let omega = v / self.lead_radius;
        omega * self.pull_out_torque(omega)
    }

    /// No-load speed `omega_M`: the positive root of the torque equation.
    ///
    /// Squaring `V sqrt(R^2 + w^2 L^2) = w psi R` gives the closed form
    /// `omega_M = V R / sqrt(psi^2 R^2 - V^2 L^2)`.
    pub fn max_no_load_speed(&self) -> Result<f64> {
        let flux_r = self.flux * self.resistance;
        let volt_l = self.voltage * self.inductance;
        if flux_r <= volt_l {
            return Err(Error::NoRealRoot { flux_r, volt_l });
        }
        Ok(self.voltage * self.resistance / (flux_r * flux_r - volt_l * volt_l).sqrt())
    }

    /// No-load speed by bisection on the torque curve, stopping once the
    /// bracket midpoint has `|M| < torque_tol` or the bracket collapses.
    pub fn no_load_speed_bisection(&self, upper: f64, torque_tol: f64) -> Result<f64> {
        self.max_no_load_speed()?;
        let (mut lo, mut hi) = (0.0_f64, upper);
        if self.pull_out_torque(hi) > 0.0 {
            return Err(Error::Precondition(format!(
                "torque still positive at the bracket end {upper} rad/s"
            )));
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            let m = self.pull_out_torque(mid);
            if m.abs() < torque_tol || hi - lo <= f64::EPSILON * hi {
                return Ok(mid);
            }
            if m > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Motor energy per unit travelled distance amortized over the transmission
    /// window, `f(v) = P(v) / (v T - dx)` (W*s/m).
    ///
    /// `max_travel` is the longest single-antenna move `dx`.
    pub fn speed_penalty(&self, v: f64, coherence_time: f64, max_travel: f64) -> Result<f64> {
        let power = self.motor_power(v)?;
        let slack = v * coherence_time - max_travel;
        if !(slack > 0.0) || max_travel < 0.0 {
            return Err(Error::InfeasibleSpeed {
                speed: v,
                distance: max_travel,
                coherence_time,
            });
        }
        Ok(power / slack)
    }

    /// Closed-form `df/dv` of [`Self::speed_penalty`]:
    /// `(v M'(w) (vT - dx) - l0 M(w) dx) / (l0^2 (vT - dx)^2)` with `w = v / l0`.
    pub fn speed_penalty_slope(&self, v: f64, coherence_time: f64, max_travel: f64) -> f64 {
        let l0 = self.lead_radius;
        let omega = v / l0;
        let slack = v * coherence_time - max_travel;
        (v * self.torque_slope(omega) * slack - l0 * self.pull_out_torque(omega) * max_travel)
            / (l0 * l0 * slack * slack)
    }
}
