use crate::flux::FluxModel;
use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{
    self, entropic_nodes, CostReport, EvolveOptions, Policy, SpaceTimeSolution, StopReason,
};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Decay {
    pub solution: SpaceTimeSolution,
    /// First slab time with `|u - m|_inf <= delta_target`.
    pub t_reach: f64,
    /// Priced with the exact flux.
    pub cost: CostReport,
    /// Priced with the piecewise-linear flux through the state grid, for
    /// which the tracked solution is the exact entropy solution.
    pub linearized_cost: CostReport,
    pub linearized_model: FluxModel,
}

/// Entropic front tracking from `u_i` until the sup distance to the mean
/// drops to `delta_target`.
pub fn kruzkhov_decay(
    model: &FluxModel,
    u_i: &PiecewiseConstantProfile,
    delta_target: f64,
    t_max: f64,
    mesh: f64,
) -> Result<Decay> {
    if !(delta_target > 0.0) {
        return Err(Error::InvalidInput("decay target must be positive"));
    }
    let m = u_i.mean();
    let nodes = entropic_nodes(u_i.min_value(), u_i.max_value(), mesh, u_i.values());
    let linearized_model = if nodes.len() >= 2 {
        model.linearized(&nodes)?
    } else {
        model.clone()
    };
    let policy = Policy::Entropic { mesh };
    let mut distance = u_i.sup_distance_to(m);
    let (solution, reason) = tracker::evolve_until(
        model,
        u_i,
        t_max,
        &policy,
        EvolveOptions::default(),
        &mut |_, fronts| {
            distance = fronts
                .iter()
                .map(|f| (f.left - m).abs().max((f.right - m).abs()))
                .fold(0.0, f64::max);
            distance <= delta_target
        },
    )?;
    if reason != StopReason::Predicate {
        return Err(Error::NotReached {
            time: solution.t_final(),
            distance,
        });
    }
    let cost = tracker::h_cost(&solution)?;
    let linearized_cost = tracker::h_cost_under(&solution, &linearized_model)?;
    Ok(Decay {
        t_reach: solution.t_final(),
        solution,
        cost,
        linearized_cost,
        linearized_model,
    })
}
