use crate::baselines::SolverSettings;
use crate::error::Result;
use crate::metrics::Objective;
use crate::mu::mu_solve_with;
use crate::problem::{Instance, Solution};
use crate::su::su_position_search;

/// Optimizes the EE that ignores motor energy and movement delay (the travel
/// cap is still enforced), then reports the true EE of the result.
///
/// The last entry of `diagnostics.ee_trace` is the movement-blind objective.
pub fn conv_ee_solve(instance: &Instance) -> Result<Solution> {
    conv_ee_solve_with(instance, &SolverSettings::default())
}

pub fn conv_ee_solve_with(instance: &Instance, settings: &SolverSettings) -> Result<Solution> {
    if instance.num_users() == 1 {
        su_position_search(instance, &settings.su(Objective::Conventional))
    } else {
        mu_solve_with(instance, &settings.mu(Objective::Conventional))
    }
}
