use alloc::vec;
use alloc::vec::Vec;

use crate::flux::{FluxModel, DEFAULT_WINDOW_CAP};
use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{self, CostReport, SpaceTimeSolution};
use crate::{Error, Result};

use super::connector::{check_feasibility, connector, ConnectorParams};
use super::decay::kruzkhov_decay;
use super::{PathPlan, Stage, WINDOW_SCAN};

/// Time cap of the decay stage.
pub const DECAY_T_MAX: f64 = 1.0e7;

#[derive(Debug, Clone)]
pub struct QuasiPotentialPath {
    /// From the reflected target down to the constant `m`.
    pub plan: PathPlan,
    /// From the constant `m` up to the target: the reversal of the plan.
    pub path: SpaceTimeSolution,
    pub path_cost: CostReport,
    /// `H(plan) + W_m(u_f)`.
    pub identity_cost: f64,
    /// `W_m(u_f)`.
    pub target_w: f64,
}

impl QuasiPotentialPath {
    pub fn cost(&self) -> f64 {
        self.path_cost.total
    }

    /// `|H(path) - H(plan) - W_m(u_f)|`.
    pub fn identity_gap(&self) -> f64 {
        (self.path_cost.total - self.identity_cost).abs()
    }
}

/// A path from the constant `mean(u_f)` to `u_f`, obtained by reversing
/// entropic decay of the reflected target followed by the connector.
pub fn quasipotential_path(
    model: &FluxModel,
    u_f: &PiecewiseConstantProfile,
    params: &ConnectorParams,
    mesh: f64,
) -> Result<QuasiPotentialPath> {
    let m = u_f.mean();
    let target_w = u_f.w_m(model, m)?;
    if u_f.is_constant() {
        let path = SpaceTimeSolution::stationary(model.clone(), u_f.clone());
        let path_cost = tracker::h_cost(&path)?;
        return Ok(QuasiPotentialPath {
            plan: PathPlan {
                m,
                stages: Vec::new(),
                target_w,
            },
            path,
            path_cost,
            identity_cost: target_w,
            target_w,
        });
    }
    let start = u_f.parity();
    let decay = kruzkhov_decay(model, &start, params.delta, DECAY_T_MAX, mesh)?;
    let after = decay.solution.final_profile();
    let link = connector(model, m, &after, params)?;
    let mut stages = vec![Stage {
        name: "decay",
        solution: decay.solution,
        cost: decay.cost,
        linearized_cost: Some(decay.linearized_cost),
        params: vec![("delta", params.delta), ("mesh", mesh), ("T_reach", decay.t_reach)],
    }];
    stages.extend(link.stages);
    let plan = PathPlan {
        m,
        stages,
        target_w,
    };
    let joined = plan
        .concatenated()?
        .ok_or(Error::InvalidInput("empty plan"))?;
    let path = joined.reversed();
    let end_gap = path.final_profile().l1_distance(u_f);
    if end_gap > 1e-10 {
        return Err(Error::MismatchedInterface { l1: end_gap });
    }
    let path_cost = tracker::h_cost(&path)?;
    let identity_cost = plan.total_cost() + target_w;
    Ok(QuasiPotentialPath {
        plan,
        path,
        path_cost,
        identity_cost,
        target_w,
    })
}

/// One point of the parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub params: ConnectorParams,
    pub mesh: f64,
}

/// Log-spaced sweep over plateau height, floor ratio, perturbation bound
/// and split count, keeping only tuples that pass the feasibility check.
/// The decay mesh is refined to a fifth of the perturbation bound, since
/// the entropic evolution on a grid cannot settle closer than the mesh.
pub fn default_candidates(model: &FluxModel, m: f64, mesh: f64) -> Vec<Candidate> {
    let Ok(window) = model.convexity_window(m, WINDOW_SCAN, DEFAULT_WINDOW_CAP) else {
        return Vec::new();
    };
    let d0 = window.half_width;
    let mut out = Vec::new();
    const HEIGHTS: usize = 7;
    for k in 0..HEIGHTS {
        // 0.04 d0 .. 0.4 d0
        let d1 = d0 * 0.04 * libm::pow(10.0, k as f64 / (HEIGHTS - 1) as f64);
        for ratio in [0.3, 0.45] {
            let d2 = ratio * d1;
            for frac in [0.25, 0.5] {
                for m_split in [8, 32] {
                    let params = ConnectorParams::new(d1, d2, frac * d2, m_split);
                    if check_feasibility(model, m, &params, None).passes() {
                        out.push(Candidate {
                            params,
                            mesh: mesh.min(0.2 * params.delta),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn evaluate_candidate(
    model: &FluxModel,
    u_f: &PiecewiseConstantProfile,
    candidate: &Candidate,
) -> Result<QuasiPotentialPath> {
    quasipotential_path(model, u_f, &candidate.params, candidate.mesh)
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Option<(Candidate, QuasiPotentialPath)>,
    /// Cost of every candidate, or the error it hit.
    pub evaluated: Vec<(Candidate, Result<f64>)>,
}

/// Evaluates every candidate and keeps the cheapest path.
pub fn auto_search(
    model: &FluxModel,
    u_f: &PiecewiseConstantProfile,
    candidates: &[Candidate],
) -> SearchOutcome {
    let mut best: Option<(Candidate, QuasiPotentialPath)> = None;
    let mut evaluated = Vec::with_capacity(candidates.len());
    for c in candidates {
        match evaluate_candidate(model, u_f, c) {
            Ok(path) => {
                evaluated.push((*c, Ok(path.cost())));
                if best.as_ref().map_or(true, |(_, b)| path.cost() < b.cost()) {
                    best = Some((*c, path));
                }
            }
            Err(e) => evaluated.push((*c, Err(e))),
        }
    }
    SearchOutcome { best, evaluated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_target_is_free() {
        let model = FluxModel::cubic();
        let u = PiecewiseConstantProfile::constant(0.1);
        let q = quasipotential_path(&model, &u, &ConnectorParams::new(0.1, 0.04, 0.01, 8), 0.002)
            .unwrap();
        assert_eq!(q.cost(), 0.0);
        assert_eq!(q.target_w, 0.0);
    }

    #[test]
    fn path_cost_sits_above_the_target() {
        let model = FluxModel::cubic();
        let u = PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![0.1, -0.1]).unwrap();
        let params = ConnectorParams::new(0.05, 0.0225, 0.005, 8);
        let q = quasipotential_path(&model, &u, &params, 0.001).unwrap();
        assert!((q.target_w - 0.005).abs() < 1e-15);
        assert!(q.cost() >= q.target_w - 1e-9);
        assert!(q.identity_gap() <= 1e-9);
        assert!(q.path.initial_profile().is_constant());
        assert!(q.path.final_profile().l1_distance(&u) <= 1e-10);
    }

    #[test]
    fn candidates_are_feasible() {
        let model = FluxModel::cubic();
        let c = default_candidates(&model, 0.0, 0.01);
        assert!(!c.is_empty());
        for cand in &c {
            assert!(cand.mesh <= 0.2 * cand.params.delta);
        }
    }
}
