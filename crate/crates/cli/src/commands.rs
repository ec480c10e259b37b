//! One function per command. Each returns a [`Run`]; [`execute`] writes
//! the artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use shockcost_core::constructions::{
    self, check_feasibility, ConnectorParams, FeasibilityReport, PathPlan, WINDOW_SCAN,
};
use shockcost_core::flux::DEFAULT_WINDOW_CAP;
use shockcost_core::tracker::{self, check_weak_solution};
use shockcost_core::{FluxModel, PiecewiseConstantProfile, Policy, SpaceTimeSolution};

use crate::dto::{kind_name, CostDto, ModelSpec, PlanDto, SolutionDto, WeakDto};
use crate::error::{CliError, CliResult};
use crate::format::{float, to_json};
use crate::scenario::{Command, Scenario};
use crate::svg::{emit_svg, SvgStyle};

/// Command line options after parsing.
#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub scenario: PathBuf,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub svg: bool,
}

/// What a command produced, before anything is written.
#[derive(Debug, Default)]
pub struct Run {
    pub model: Option<ModelSpec>,
    pub summary: Map<String, Value>,
    pub cost: Option<CostDto>,
    pub weak_check: Option<WeakDto>,
    /// Named pieces drawn in the trajectory table, in time order.
    pub pieces: Vec<(String, SpaceTimeSolution)>,
    pub solution: Option<SpaceTimeSolution>,
    pub plan: Option<PathPlan>,
    pub sweep_csv: Option<String>,
    pub sweep_rows: Option<Value>,
}

#[derive(Serialize)]
struct Results<'a> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a ModelSpec>,
    summary: &'a Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<&'a CostDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak_check: Option<&'a WeakDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    results: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<PlanDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<SolutionDto>,
}

#[derive(Serialize)]
struct Failure<'a> {
    command: &'static str,
    error: &'a str,
    exit_code: i32,
}

/// Runs the command and writes its artifacts; returns the written paths.
pub fn execute(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let scenario = Scenario::load(&opts.scenario)?;
    if let Some(c) = scenario.command {
        if c != opts.command {
            return Err(CliError::validation(format!(
                "scenario is for {:?} but the command line asks for {:?}",
                c.name(),
                opts.command.name()
            )));
        }
    }
    let out = match (&opts.out, &scenario.output.dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => scenario.resolve(d),
        (None, None) => PathBuf::from("."),
    };
    fs::create_dir_all(&out)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", out.display())))?;
    match run(opts.command, &scenario, opts.jobs) {
        Ok(run) => write_artifacts(opts.command, &run, &out, opts.svg || scenario.output.svg),
        Err(e) => {
            let failure = Failure {
                command: opts.command.name(),
                error: &e.to_string(),
                exit_code: e.exit_code(),
            };
            if let Ok(text) = to_json(&failure) {
                let _ = fs::write(out.join("results.json"), text);
            }
            Err(e)
        }
    }
}

pub fn run(command: Command, sc: &Scenario, jobs: Option<usize>) -> CliResult<Run> {
    info!("running {}", command.name());
    match command {
        Command::Evolve => evolve_cmd(sc),
        Command::SplitEvolve => split_evolve_cmd(sc),
        Command::Absorber => absorber_cmd(sc),
        Command::Connect => connect_cmd(sc),
        Command::Quasipotential => quasipotential_cmd(sc),
        Command::Cost => cost_cmd(sc),
        Command::Reverse => reverse_cmd(sc),
        Command::Sweep => sweep_cmd(sc, jobs),
    }
}

fn write_file(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> CliResult<()> {
    fs::write(&path, text)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
    debug!("wrote {}", path.display());
    written.push(path);
    Ok(())
}

pub fn write_artifacts(command: Command, run: &Run, out: &Path, svg: bool) -> CliResult<Vec<PathBuf>> {
    let spec = run.model.clone().unwrap_or_default();
    let results = Results {
        command: command.name(),
        model: run.model.as_ref(),
        summary: &run.summary,
        cost: run.cost.as_ref(),
        weak_check: run.weak_check.as_ref(),
        results: run.sweep_rows.as_ref(),
        plan: run.plan.as_ref().map(|p| PlanDto::new(&spec, p)),
        solution: run.solution.as_ref().map(|s| SolutionDto::new(&spec, s)),
    };
    let mut written = Vec::new();
    write_file(out.join("results.json"), &to_json(&results)?, &mut written)?;
    if !run.pieces.is_empty() {
        write_file(out.join("trajectory.csv"), &trajectory_csv(&run.pieces)?, &mut written)?;
    }
    if let Some(plan) = &run.plan {
        write_file(out.join("summary.csv"), &plan_csv(plan)?, &mut written)?;
    }
    if let Some(csv) = &run.sweep_csv {
        write_file(out.join("sweep.csv"), csv, &mut written)?;
    }
    if svg {
        if let Some(sol) = &run.solution {
            write_file(out.join("diagram.svg"), &emit_svg(sol, &SvgStyle::default()), &mut written)?;
        }
    }
    Ok(written)
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Numerical(format!("CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

pub fn trajectory_csv(pieces: &[(String, SpaceTimeSolution)]) -> CliResult<String> {
    let mut rows = Vec::new();
    let mut offset = 0.0;
    for (name, sol) in pieces {
        let model = sol.model();
        for (k, slab) in sol.slabs().iter().enumerate() {
            for f in &slab.fronts {
                let rate = model.shock_cost_rate(f.left, f.right)?;
                rows.push(vec![
                    name.clone(),
                    k.to_string(),
                    float(offset + slab.t_start),
                    float(offset + slab.t_end),
                    f.id.to_string(),
                    float(f.x_start),
                    float(f.x_end),
                    float(f.speed),
                    float(f.left),
                    float(f.right),
                    kind_name(f.kind).to_string(),
                    float(rate),
                ]);
            }
        }
        offset += sol.t_final();
    }
    csv_text(
        &["stage", "slab", "t_start", "t_end", "front_id", "x_start", "x_end", "speed", "left", "right", "kind", "rate"],
        rows,
    )
}

pub fn plan_csv(plan: &PathPlan) -> CliResult<String> {
    let rows = plan
        .stages
        .iter()
        .map(|s| {
            vec![
                s.name.to_string(),
                float(s.solution.t_final()),
                float(s.cost.total),
                float(s.cost.jv),
                float(plan.target_w),
            ]
        })
        .collect();
    csv_text(&["stage", "duration", "H", "JV", "W_target"], rows)
}

fn weak_of(sols: &[&SpaceTimeSolution], tol: f64) -> WeakDto {
    let mut acc = WeakDto {
        max_rh_residual: 0.0,
        max_mass_drift: 0.0,
        max_continuity_gap: 0.0,
        trace_mismatches: 0,
        passes: true,
    };
    for s in sols {
        let r = check_weak_solution(s, tol);
        acc.max_rh_residual = acc.max_rh_residual.max(r.max_rh_residual);
        acc.max_mass_drift = acc.max_mass_drift.max(r.max_mass_drift);
        acc.max_continuity_gap = acc.max_continuity_gap.max(r.max_continuity_gap);
        acc.trace_mismatches += r.trace_mismatches;
        acc.passes &= r.passes;
    }
    acc
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn default_mesh() -> f64 {
    0.01
}

fn default_m_split() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    Entropic,
    Split,
    SingleShock,
}

/// A tracked evolution of the scenario profile.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub t: f64,
    #[serde(default = "default_policy")]
    pub policy: PolicyName,
    #[serde(default = "default_mesh")]
    pub mesh: f64,
    #[serde(default = "default_m_split")]
    pub m_split: usize,
    /// Centre of the convexity window for the split policy; the profile
    /// mean when unset.
    pub center: Option<f64>,
}

fn default_policy() -> PolicyName {
    PolicyName::Entropic
}

impl RunSpec {
    fn evolve(&self, model: &FluxModel, p: &PiecewiseConstantProfile) -> CliResult<SpaceTimeSolution> {
        let policy = match self.policy {
            PolicyName::Entropic => {
                if !(self.mesh > 0.0) {
                    return Err(CliError::validation("mesh must be positive"));
                }
                Policy::Entropic { mesh: self.mesh }
            }
            PolicyName::SingleShock => Policy::SingleShock,
            PolicyName::Split => {
                let center = self.center.unwrap_or_else(|| p.mean());
                let window = model.convexity_window(center, WINDOW_SCAN, DEFAULT_WINDOW_CAP)?;
                Policy::Split { window, m: self.m_split }
            }
        };
        Ok(tracker::evolve(model, p, self.t, &policy)?)
    }
}

/// Cost, entropy balance and weak check of one solution.
fn solution_run(spec: ModelSpec, sol: SpaceTimeSolution, name: &str, weak_tol: f64) -> CliResult<Run> {
    let model = sol.model();
    let cost = tracker::h_cost(&sol)?;
    let mean = sol.initial_profile().mean();
    let w0 = sol.initial_profile().w_m(model, mean)?;
    let w1 = sol.final_profile().w_m(model, mean)?;
    let summary = json!({
        "t_final": sol.t_final(),
        "slabs": sol.slabs().len(),
        "max_fronts": sol.max_front_count(),
        "mean": mean,
        "h_total": cost.total,
        "jv_total": cost.jv,
        "w_initial": w0,
        "w_final": w1,
    });
    Ok(Run {
        model: Some(spec),
        summary: object(summary),
        cost: Some(CostDto::full(&cost)),
        weak_check: Some(weak_of(&[&sol], weak_tol)),
        pieces: vec![(name.to_string(), sol.clone())],
        solution: Some(sol),
        ..Run::default()
    })
}

fn evolve_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let spec_run: RunSpec = sc.params()?;
    let sol = spec_run.evolve(&model, &sc.profile()?)?;
    solution_run(spec, sol, "evolve", sc.weak_tol())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitParams {
    t_bar: f64,
    #[serde(default = "default_m_split")]
    m_split: usize,
    m: Option<f64>,
}

fn split_evolve_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let p: SplitParams = sc.params()?;
    let u = sc.profile()?;
    let m = p.m.unwrap_or_else(|| u.mean());
    let s = constructions::split_evolution(&model, m, &u, p.t_bar, p.m_split)?;
    let mut run = solution_run(spec, s.solution, "split", sc.weak_tol())?;
    run.summary.extend(object(json!({
        "m": m,
        "m_split": p.m_split,
        "discontinuities": s.discontinuities,
        "max_anti_entropic": s.max_anti_entropic,
        "taylor_bound": s.taylor_bound,
        "fitted_constant": s.fitted_constant,
    })));
    Ok(run)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbsorberParams {
    m: f64,
    d1: f64,
    d2: f64,
    #[serde(default = "half")]
    x0: f64,
}

fn half() -> f64 {
    0.5
}

fn absorber_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let p: AbsorberParams = sc.params()?;
    let a = constructions::two_shock_absorber(&model, p.m, p.d1, p.d2, p.x0)?;
    let mut run = solution_run(spec, a.solution, "absorber", sc.weak_tol())?;
    run.summary.extend(object(json!({
        "m": p.m,
        "d1": p.d1,
        "d2": p.d2,
        "x0": p.x0,
        "tau": a.tau,
        "bound": a.bound,
        "final_constant": run.solution.as_ref().is_some_and(|s| s.final_profile().is_constant()),
    })));
    Ok(run)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectArgs {
    m: Option<f64>,
    d1: f64,
    d2: f64,
    delta: f64,
    #[serde(default = "default_m_split")]
    m_split: usize,
    t_bar: Option<f64>,
    gamma: Option<f64>,
}

fn feasibility_json(r: &FeasibilityReport) -> Value {
    let conditions: Vec<Value> = r
        .conditions
        .iter()
        .map(|c| json!({"name": c.name, "pass": c.pass, "margin": c.margin}))
        .collect();
    json!({"passes": r.passes(), "budget": r.budget, "conditions": conditions})
}

fn plan_run(spec: ModelSpec, plan: PathPlan, weak_tol: f64) -> CliResult<Run> {
    let sols: Vec<&SpaceTimeSolution> = plan.stages.iter().map(|s| &s.solution).collect();
    let weak = weak_of(&sols, weak_tol);
    let pieces = plan
        .stages
        .iter()
        .map(|s| (s.name.to_string(), s.solution.clone()))
        .collect();
    let solution = plan.concatenated()?;
    let summary = json!({
        "m": plan.m,
        "stages": plan.stages.len(),
        "total_cost": plan.total_cost(),
        "total_jv": plan.total_jv(),
        "total_duration": plan.total_duration(),
        "target_w": plan.target_w,
    });
    Ok(Run {
        model: Some(spec),
        summary: object(summary),
        weak_check: Some(weak),
        pieces,
        solution,
        plan: Some(plan),
        ..Run::default()
    })
}

fn connect_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let a: ConnectArgs = sc.params()?;
    let u = sc.profile()?;
    let m = a.m.unwrap_or_else(|| u.mean());
    let params = ConnectorParams {
        t_bar: a.t_bar,
        ..ConnectorParams::new(a.d1, a.d2, a.delta, a.m_split)
    };
    let report = check_feasibility(&model, m, &params, a.gamma);
    let plan = constructions::connector(&model, m, &u, &params)?;
    let mut run = plan_run(spec, plan, sc.weak_tol())?;
    run.summary.insert("feasibility".into(), feasibility_json(&report));
    run.summary.insert("horizon".into(), json!(params.horizon(&model, m)));
    Ok(run)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuasiArgs {
    #[serde(default)]
    auto: bool,
    d1: Option<f64>,
    d2: Option<f64>,
    delta: Option<f64>,
    #[serde(default = "default_m_split")]
    m_split: usize,
    t_bar: Option<f64>,
    #[serde(default = "default_mesh")]
    mesh: f64,
}

fn candidate_json(c: &constructions::Candidate, outcome: &shockcost_core::Result<f64>) -> Value {
    let p = &c.params;
    let mut v = json!({
        "d1": p.d1,
        "d2": p.d2,
        "delta": p.delta,
        "m_split": p.m_split,
        "mesh": c.mesh,
    });
    match outcome {
        Ok(cost) => v["cost"] = json!(cost),
        Err(e) => v["error"] = json!(e.to_string()),
    }
    v
}

fn quasipotential_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let a: QuasiArgs = sc.params()?;
    let u = sc.profile()?;
    if !(a.mesh > 0.0) {
        return Err(CliError::validation("mesh must be positive"));
    }
    let (path, candidates) = if a.auto {
        let cands = constructions::default_candidates(&model, u.mean(), a.mesh);
        if cands.is_empty() {
            return Err(CliError::validation("no feasible connector parameters for this profile"));
        }
        let out = constructions::auto_search(&model, &u, &cands);
        let listed: Vec<Value> = out.evaluated.iter().map(|(c, r)| candidate_json(c, r)).collect();
        let Some((_, best)) = out.best else {
            let first = out.evaluated.into_iter().find_map(|(_, r)| r.err());
            return Err(first.map(CliError::from).unwrap_or_else(|| CliError::Numerical("no candidate succeeded".into())));
        };
        (best, Some(listed))
    } else {
        let need = |v: Option<f64>, n: &str| {
            v.ok_or_else(|| CliError::validation(format!("params.{n} is required unless auto is set")))
        };
        let params = ConnectorParams {
            t_bar: a.t_bar,
            ..ConnectorParams::new(need(a.d1, "d1")?, need(a.d2, "d2")?, need(a.delta, "delta")?, a.m_split)
        };
        let path = constructions::quasipotential_path(&model, &u, &params, a.mesh)?;
        (path, None)
    };
    let mut run = plan_run(spec, path.plan.clone(), sc.weak_tol())?;
    run.summary.extend(object(json!({
        "path_cost": path.cost(),
        "path_jv": path.path_cost.jv,
        "identity_cost": path.identity_cost,
        "identity_gap": path.identity_gap(),
        "target_w": path.target_w,
    })));
    if let Some(c) = candidates {
        run.summary.insert("candidates".into(), Value::Array(c));
    }
    run.weak_check = Some(weak_of(&[&path.path], sc.weak_tol()));
    run.cost = Some(CostDto::brief(&path.path_cost));
    run.pieces = vec![("path".to_string(), path.path.clone())];
    run.solution = Some(path.path);
    Ok(run)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SolutionSource {
    File {
        solution: PathBuf,
    },
    Run(RunSpec),
}

/// The solution to price: read from a file or tracked from the profile.
fn source_solution(sc: &Scenario) -> CliResult<(ModelSpec, SpaceTimeSolution)> {
    let src: SolutionSource = sc.params().map_err(|_| {
        CliError::validation("params: expected {\"solution\": file} or an evolution spec with \"t\"")
    })?;
    match src {
        SolutionSource::File { solution } => {
            let dto = sc.solution_file(&solution)?;
            let spec = sc.model_spec(Some(&dto.model))?;
            let sol = dto.build()?.with_model(spec.build()?);
            Ok((spec, sol))
        }
        SolutionSource::Run(r) => {
            let (spec, model) = sc.model()?;
            let sol = r.evolve(&model, &sc.profile()?)?;
            Ok((spec, sol))
        }
    }
}

fn cost_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, sol) = source_solution(sc)?;
    let mut run = solution_run(spec, sol, "cost", sc.weak_tol())?;
    if let Some(c) = &run.cost {
        run.summary.insert("signed_total".into(), json!(c.signed_total));
    }
    Ok(run)
}

fn reverse_cmd(sc: &Scenario) -> CliResult<Run> {
    let (spec, sol) = source_solution(sc)?;
    let forward = tracker::h_cost(&sol)?;
    let back = sol.reversed();
    let mut run = solution_run(spec, back, "reverse", sc.weak_tol())?;
    let model = sol.model();
    let mean = sol.initial_profile().mean();
    let w0 = sol.initial_profile().w_m(model, mean)?;
    let w1 = sol.final_profile().w_m(model, mean)?;
    let h_rev = run.cost.as_ref().map_or(0.0, |c| c.h_total);
    run.summary.extend(object(json!({
        "h_forward": forward.total,
        "h_reversed": h_rev,
        "identity_residual": forward.total - h_rev - (w1 - w0),
    })));
    Ok(run)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SweepArgs {
    Split {
        #[serde(default = "default_m_values")]
        m_values: Vec<usize>,
        #[serde(default = "one")]
        t_bar: f64,
        m: Option<f64>,
    },
    Quasipotential {
        #[serde(default = "default_mesh")]
        mesh: f64,
    },
}

fn default_m_values() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}

fn one() -> f64 {
    1.0
}

/// Least-squares slope of `ln y` against `ln x` over positive pairs.
pub fn log_log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = pts
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Numerical(format!("worker pool: {e}")))
}

fn sweep_cmd(sc: &Scenario, jobs: Option<usize>) -> CliResult<Run> {
    let (spec, model) = sc.model()?;
    let args: SweepArgs = sc.params()?;
    let u = sc.profile()?;
    let pool = pool(jobs)?;
    match args {
        SweepArgs::Split { m_values, t_bar, m } => {
            if m_values.is_empty() {
                return Err(CliError::validation("params.m_values is empty"));
            }
            let m = m.unwrap_or_else(|| u.mean());
            let runs: Vec<_> = pool.install(|| {
                m_values
                    .par_iter()
                    .map(|&k| constructions::split_evolution(&model, m, &u, t_bar, k))
                    .collect()
            });
            let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
            let pts: Vec<(f64, f64)> =
                m_values.iter().zip(&runs).map(|(&k, r)| (k as f64, r.cost.total)).collect();
            let slope = log_log_slope(&pts).unwrap_or(f64::NAN);
            let mut rows = Vec::new();
            let mut listed = Vec::new();
            for (&k, r) in m_values.iter().zip(&runs) {
                rows.push(vec![
                    k.to_string(),
                    float(r.cost.total),
                    float(r.cost.jv),
                    r.max_anti_entropic.to_string(),
                    r.discontinuities.to_string(),
                    float(r.taylor_bound),
                    float(slope),
                ]);
                listed.push(json!({
                    "m_split": k,
                    "h_total": r.cost.total,
                    "jv_total": r.cost.jv,
                    "max_anti_entropic": r.max_anti_entropic,
                    "discontinuities": r.discontinuities,
                    "taylor_bound": r.taylor_bound,
                }));
            }
            let sols: Vec<&SpaceTimeSolution> = runs.iter().map(|r| &r.solution).collect();
            Ok(Run {
                model: Some(spec),
                summary: object(json!({"kind": "split", "m": m, "t_bar": t_bar, "fitted_slope": slope})),
                weak_check: Some(weak_of(&sols, sc.weak_tol())),
                sweep_csv: Some(csv_text(
                    &["m_split", "h_total", "jv_total", "max_anti_entropic", "discontinuities", "taylor_bound", "fitted_slope"],
                    rows,
                )?),
                sweep_rows: Some(Value::Array(listed)),
                ..Run::default()
            })
        }
        SweepArgs::Quasipotential { mesh } => {
            if !(mesh > 0.0) {
                return Err(CliError::validation("mesh must be positive"));
            }
            let cands = constructions::default_candidates(&model, u.mean(), mesh);
            let costs: Vec<shockcost_core::Result<f64>> = pool.install(|| {
                cands
                    .par_iter()
                    .map(|c| constructions::evaluate_candidate(&model, &u, c).map(|p| p.cost()))
                    .collect()
            });
            let mut rows = Vec::new();
            let mut listed = Vec::new();
            let mut best: Option<(usize, f64)> = None;
            for (i, (c, r)) in cands.iter().zip(&costs).enumerate() {
                let p = &c.params;
                let (cost, err) = match r {
                    Ok(v) => {
                        if best.map_or(true, |(_, b)| *v < b) {
                            best = Some((i, *v));
                        }
                        (float(*v), String::new())
                    }
                    Err(e) => (String::new(), e.to_string()),
                };
                rows.push(vec![
                    float(p.d1),
                    float(p.d2),
                    float(p.delta),
                    p.m_split.to_string(),
                    float(c.mesh),
                    cost,
                    err,
                ]);
                listed.push(candidate_json(c, r));
            }
            let target = u.w_m(&model, u.mean())?;
            let mut summary = object(json!({
                "kind": "quasipotential",
                "candidates": cands.len(),
                "target_w": target,
            }));
            if let Some((i, v)) = best {
                summary.insert("best_index".into(), json!(i));
                summary.insert("best_cost".into(), json!(v));
            }
            Ok(Run {
                model: Some(spec),
                summary,
                sweep_csv: Some(csv_text(&["d1", "d2", "delta", "m_split", "mesh", "cost", "error"], rows)?),
                sweep_rows: Some(Value::Array(listed)),
                ..Run::default()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&x: &f64| (x, 3.0 * x.powi(-2))).collect();
        assert!((log_log_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn single_shock_cost_run() {
        let sc = Scenario::parse(
            r#"{"model": {"builtin": "burgers"},
                "profile": {"breakpoints": [0.25, 0.75], "values": [1, 0]},
                "params": {"t": 1, "policy": "single_shock"}}"#,
        )
        .unwrap();
        let run = run(Command::Cost, &sc, None).unwrap();
        let h = run.summary["h_total"].as_f64().unwrap();
        assert!((h - 1.0 / 12.0).abs() < 1e-9);
        assert!(run.weak_check.unwrap().passes);
        let csv = trajectory_csv(&run.pieces).unwrap();
        assert!(csv.starts_with("stage,slab,t_start"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn missing_params_are_validation_errors() {
        let sc = Scenario::parse(r#"{"model": {"builtin": "cubic"}, "params": {"m": 0}}"#).unwrap();
        assert!(matches!(run(Command::Absorber, &sc, None), Err(CliError::Validation(_))));
        let sc = Scenario::parse(r#"{"model": {"builtin": "cubic"}, "params": {"kind": "other"}}"#).unwrap();
        assert!(matches!(run(Command::Sweep, &sc, None), Err(CliError::Validation(_))));
    }
}
