use crate::error::Result;
use crate::baselines::SolverSettings;
use crate::metrics::Objective;
use crate::mu::{absorb, mrt_init, precode_at};
use crate::problem::{Diagnostics, Instance, Solution};
use crate::su::{mrt_precoder, su_power};

/// Antennas stay where they are; only the precoder is optimized.
pub fn fpa_solve(instance: &Instance) -> Result<Solution> {
    fpa_solve_with(instance, &SolverSettings::default())
}

pub fn fpa_solve_with(instance: &Instance, settings: &SolverSettings) -> Result<Solution> {
    let cpv = instance.array.cpv.clone();
    let mut diag = Diagnostics::default();
    let w = if instance.num_users() == 1 {
        let p = su_power(instance, &cpv, &settings.su(Objective::Block));
        diag.dinkelbach_iterations = p.iterations;
        diag.eta_trace = p.trace;
        diag.converged = p.converged;
        mrt_precoder(instance, &cpv, p.power)?
    } else {
        let w0 = mrt_init(&instance.channel(&cpv), instance.scenario.p_max);
        let p = precode_at(instance, &cpv, &w0, Objective::Block, &settings.precoding)?;
        absorb(&mut diag, &p);
        diag.converged = p.converged;
        p.w
    };
    instance.solution(cpv, w, diag)
}
