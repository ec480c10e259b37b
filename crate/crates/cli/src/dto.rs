//! Serializable mirrors of the core types.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use shockcost_core::constructions::{PathPlan, Stage};
use shockcost_core::tracker::{CostRow, WeakSolutionReport};
use shockcost_core::{
    CostReport, FluxModel, Front, FrontKind, PiecewiseConstantProfile, Slab, SpaceTimeSolution,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// Coefficients, constant term first.
    pub poly: Vec<f64>,
}

/// `{"builtin": "burgers" | "cubic"}` or explicit polynomials. A builtin
/// fixes the flux only; diffusion and mobility default to 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub working_interval: Option<[f64; 2]>,
}

impl ModelSpec {
    pub fn build(&self) -> CliResult<FluxModel> {
        let flux = match (&self.builtin, &self.flux) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation("model: give either builtin or flux, not both"))
            }
            (Some(name), None) => match name.as_str() {
                "burgers" => vec![0.0, 0.0, 0.5],
                "cubic" => vec![0.0, -1.0, 0.0, 1.0],
                other => return Err(CliError::validation(format!("model: unknown builtin {other:?}"))),
            },
            (None, Some(c)) => c.poly.clone(),
            (None, None) => return Err(CliError::validation("model: flux is missing")),
        };
        let one = || vec![1.0];
        let d = self.diffusion.as_ref().map_or_else(one, |c| c.poly.clone());
        let s = self.mobility.as_ref().map_or_else(one, |c| c.poly.clone());
        if [&flux, &d, &s].iter().any(|c| c.is_empty() || c.iter().any(|x| !x.is_finite())) {
            return Err(CliError::validation("model: coefficients must be finite and non-empty"));
        }
        let mut model = FluxModel::polynomial(&flux, &d, &s)?;
        if let Some(tol) = self.quad_tol {
            model = model.with_quad_tol(tol)?;
        }
        if let Some([lo, hi]) = self.working_interval {
            model = model.with_working_interval(lo, hi)?;
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDto {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl ProfileDto {
    pub fn build(&self) -> CliResult<PiecewiseConstantProfile> {
        Ok(PiecewiseConstantProfile::new(self.breakpoints.clone(), self.values.clone())?)
    }
}

impl From<&PiecewiseConstantProfile> for ProfileDto {
    fn from(p: &PiecewiseConstantProfile) -> Self {
        ProfileDto {
            breakpoints: p.breakpoints().to_vec(),
            values: p.values().to_vec(),
        }
    }
}

pub fn kind_name(kind: FrontKind) -> &'static str {
    match kind {
        FrontKind::Entropic => "entropic",
        FrontKind::AntiEntropic => "anti_entropic",
        FrontKind::Mixed => "mixed",
    }
}

fn parse_kind(name: &str) -> CliResult<FrontKind> {
    match name {
        "entropic" => Ok(FrontKind::Entropic),
        "anti_entropic" => Ok(FrontKind::AntiEntropic),
        "mixed" => Ok(FrontKind::Mixed),
        other => Err(CliError::validation(format!("unknown front kind {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontDto {
    pub id: u64,
    pub x_start: f64,
    pub x_end: f64,
    pub speed: f64,
    pub left: f64,
    pub right: f64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabDto {
    pub t_start: f64,
    pub t_end: f64,
    pub duration: f64,
    pub background: f64,
    pub fronts: Vec<FrontDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDto {
    pub model: ModelSpec,
    pub initial: ProfileDto,
    pub slabs: Vec<SlabDto>,
}

impl SolutionDto {
    pub fn new(spec: &ModelSpec, sol: &SpaceTimeSolution) -> Self {
        SolutionDto {
            model: spec.clone(),
            initial: sol.initial_profile().into(),
            slabs: sol
                .slabs()
                .iter()
                .map(|s| SlabDto {
                    t_start: s.t_start,
                    t_end: s.t_end,
                    duration: s.duration,
                    background: s.background,
                    fronts: s
                        .fronts
                        .iter()
                        .map(|f| FrontDto {
                            id: f.id,
                            x_start: f.x_start,
                            x_end: f.x_end,
                            speed: f.speed,
                            left: f.left,
                            right: f.right,
                            kind: kind_name(f.kind).to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds the solution; stored slab times must agree with the
    /// prefix sums of the durations.
    pub fn build(&self) -> CliResult<SpaceTimeSolution> {
        let model = self.model.build()?;
        let initial = self.initial.build()?;
        let mut slabs = Vec::with_capacity(self.slabs.len());
        for s in &self.slabs {
            if !(s.duration >= 0.0) {
                return Err(CliError::validation("slab durations must be non-negative"));
            }
            let mut fronts = Vec::with_capacity(s.fronts.len());
            for f in &s.fronts {
                fronts.push(Front {
                    id: f.id,
                    x_start: f.x_start,
                    x_end: f.x_end,
                    speed: f.speed,
                    left: f.left,
                    right: f.right,
                    kind: parse_kind(&f.kind)?,
                });
            }
            slabs.push(Slab::new(s.duration, fronts, s.background));
        }
        let sol = SpaceTimeSolution::from_slabs(model, initial, slabs);
        for (a, b) in sol.slabs().iter().zip(&self.slabs) {
            if a.t_start != b.t_start || a.t_end != b.t_end {
                return Err(CliError::validation(format!(
                    "slab times [{}, {}] do not match the durations",
                    b.t_start, b.t_end
                )));
            }
        }
        Ok(sol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRowDto {
    pub slab: usize,
    pub front_id: u64,
    pub duration: f64,
    pub left: f64,
    pub right: f64,
    pub rate: f64,
    pub signed_rate: f64,
}

impl From<&CostRow> for CostRowDto {
    fn from(r: &CostRow) -> Self {
        CostRowDto {
            slab: r.slab,
            front_id: r.front_id,
            duration: r.duration,
            left: r.left,
            right: r.right,
            rate: r.rate,
            signed_rate: r.signed_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostDto {
    pub h_total: f64,
    pub jv_total: f64,
    pub signed_total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<CostRowDto>>,
}

impl CostDto {
    pub fn full(c: &CostReport) -> Self {
        CostDto {
            rows: Some(c.rows.iter().map(Into::into).collect()),
            ..CostDto::brief(c)
        }
    }

    pub fn brief(c: &CostReport) -> Self {
        CostDto {
            h_total: c.total,
            jv_total: c.jv,
            signed_total: c.signed_total,
            rows: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakDto {
    pub max_rh_residual: f64,
    pub max_mass_drift: f64,
    pub max_continuity_gap: f64,
    pub trace_mismatches: usize,
    pub passes: bool,
}

impl From<&WeakSolutionReport> for WeakDto {
    fn from(r: &WeakSolutionReport) -> Self {
        WeakDto {
            max_rh_residual: r.max_rh_residual,
            max_mass_drift: r.max_mass_drift,
            max_continuity_gap: r.max_continuity_gap,
            trace_mismatches: r.trace_mismatches,
            passes: r.passes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageDto {
    pub name: String,
    pub duration: f64,
    pub cost: CostDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linearized_cost: Option<CostDto>,
    pub params: BTreeMap<String, f64>,
    pub solution: SolutionDto,
}

impl StageDto {
    pub fn new(spec: &ModelSpec, s: &Stage) -> Self {
        StageDto {
            name: s.name.to_string(),
            duration: s.solution.t_final(),
            cost: CostDto::brief(&s.cost),
            linearized_cost: s.linearized_cost.as_ref().map(CostDto::brief),
            params: s.params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            solution: SolutionDto::new(spec, &s.solution),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanDto {
    pub m: f64,
    pub target_w: f64,
    pub total_cost: f64,
    pub total_jv: f64,
    pub total_duration: f64,
    pub stages: Vec<StageDto>,
}

impl PlanDto {
    pub fn new(spec: &ModelSpec, plan: &PathPlan) -> Self {
        PlanDto {
            m: plan.m,
            target_w: plan.target_w,
            total_cost: plan.total_cost(),
            total_jv: plan.total_jv(),
            total_duration: plan.total_duration(),
            stages: plan.stages.iter().map(|s| StageDto::new(spec, s)).collect(),
        }
    }
}
