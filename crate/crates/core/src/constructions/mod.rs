//! Explicit paths built from the tracker: shock splitting, the two-shock
//! absorber, the glued connector, entropic decay and the assembled
//! quasi-potential path.

use alloc::vec::Vec;

use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{CostReport, SpaceTimeSolution};
use crate::Result;

mod absorber;
mod connector;
mod decay;
mod quasipotential;
mod split;

pub use absorber::{absorber_between, two_shock_absorber, Absorber};
pub use connector::{
    boundary_curves, check_feasibility, connector, BoundaryCurve, BoundaryCurves, Condition,
    ConnectorParams, CurvePiece, FeasibilityReport,
};
pub use decay::{kruzkhov_decay, Decay};
pub use quasipotential::{
    auto_search, default_candidates, evaluate_candidate, quasipotential_path, Candidate,
    QuasiPotentialPath, SearchOutcome,
};
pub use split::{split_evolution, SplitEvolution};

/// Half-width cap and scan resolution used for the convexity window.
pub const WINDOW_SCAN: usize = 400;

/// One stage of a path.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: &'static str,
    pub solution: SpaceTimeSolution,
    /// Priced with the stage solution's own model.
    pub cost: CostReport,
    /// For entropic stages tracked on a grid: the price under the
    /// piecewise-linear flux the fronts solve exactly.
    pub linearized_cost: Option<CostReport>,
    pub params: Vec<(&'static str, f64)>,
}

/// An ordered list of stages whose interfaces match.
#[derive(Debug, Clone)]
pub struct PathPlan {
    pub m: f64,
    pub stages: Vec<Stage>,
    /// `W_m` of the profile the plan is aimed at.
    pub target_w: f64,
}

impl PathPlan {
    pub fn total_cost(&self) -> f64 {
        self.stages.iter().map(|s| s.cost.total).sum()
    }

    pub fn total_jv(&self) -> f64 {
        self.stages.iter().map(|s| s.cost.jv).sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.stages.iter().map(|s| s.solution.t_final()).sum()
    }

    pub fn initial_profile(&self) -> Option<&PiecewiseConstantProfile> {
        self.stages.first().map(|s| s.solution.initial_profile())
    }

    pub fn final_profile(&self) -> Option<PiecewiseConstantProfile> {
        self.stages.last().map(|s| s.solution.final_profile())
    }

    /// All stages joined into one solution.
    pub fn concatenated(&self) -> Result<Option<SpaceTimeSolution>> {
        let mut iter = self.stages.iter();
        let Some(first) = iter.next() else {
            return Ok(None);
        };
        let mut sol = first.solution.clone();
        for s in iter {
            sol = sol.concat(&s.solution)?;
        }
        Ok(Some(sol))
    }
}
