//! Energy-efficiency optimization for movable-antenna downlinks whose
//! antennas are driven by stepper motors along a linear rail.

pub mod baselines;
pub mod channel;
pub mod error;
pub mod harness;
pub mod kinematics;
pub mod metrics;
pub mod motor;
pub mod mu;
pub mod problem;
pub mod sca;
pub mod search;
pub mod su;

pub use error::{Error, Result};
