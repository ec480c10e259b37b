use alloc::vec;
use alloc::vec::Vec;

use crate::flux::{FluxModel, DEFAULT_WINDOW_CAP};
use crate::math::wrap_unit;
use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{self, check_weak_solution, Front, Slab, SpaceTimeSolution};
use crate::{Error, Result};

use super::absorber::absorber_between;
use super::split::{split_evolution, window_maxima};
use super::{PathPlan, Stage, WINDOW_SCAN};

const ID_S1: u64 = 1 << 50;
const ID_S2: u64 = ID_S1 + 1;
const ID_MID: u64 = ID_S1 + 2;
/// Crossings allowed per boundary curve.
const CURVE_EVENT_BUDGET: usize = 1_000_000;
/// Fronts this close to a boundary curve are placed by their values.
const CONTACT_TOL: f64 = 1e-12;

/// Parameters of the connector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectorParams {
    /// Plateau height above `m`.
    pub d1: f64,
    /// Floor depth below `m`.
    pub d2: f64,
    /// Bound on `|u_i - m|`.
    pub delta: f64,
    /// Split count of the inner evolution.
    pub m_split: usize,
    /// Horizon of the inner evolution; `4 / (R(d1, 0) - f'(m))` when unset.
    pub t_bar: Option<f64>,
}

impl ConnectorParams {
    pub fn new(d1: f64, d2: f64, delta: f64, m_split: usize) -> Self {
        ConnectorParams {
            d1,
            d2,
            delta,
            m_split,
            t_bar: None,
        }
    }

    pub fn horizon(&self, model: &FluxModel, m: f64) -> f64 {
        self.t_bar.unwrap_or_else(|| {
            4.0 / (model.rankine_hugoniot(m + self.d1, m) - model.df(m))
        })
    }
}

/// Outcome of one feasibility condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub pass: bool,
    /// Positive when the condition holds with room to spare.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub conditions: Vec<Condition>,
    /// Left side of the cost budget inequality (compared to `gamma / 8`).
    pub budget: f64,
}

impl FeasibilityReport {
    pub fn passes(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, margin: f64) {
        self.conditions.push(Condition {
            name,
            pass: margin > 0.0,
            margin,
        });
    }

    fn push_ge(&mut self, name: &'static str, margin: f64) {
        self.conditions.push(Condition {
            name,
            pass: margin >= 0.0,
            margin,
        });
    }

    fn first_failure(&self) -> Option<&'static str> {
        self.conditions.iter().find(|c| !c.pass).map(|c| c.name)
    }
}

const GRID_1D: usize = 512;
const GRID_2D: usize = 64;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 })
}

/// Evaluates the parameter conditions of the connector numerically on
/// grids over the perturbation range `[-delta, delta]`. `gamma`, when
/// given, adds the cost budget check.
pub fn check_feasibility(
    model: &FluxModel,
    m: f64,
    params: &ConnectorParams,
    gamma: Option<f64>,
) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        conditions: Vec::new(),
        budget: f64::NAN,
    };
    let ConnectorParams { d1, d2, delta, .. } = *params;
    let window = match model.convexity_window(m, WINDOW_SCAN, DEFAULT_WINDOW_CAP) {
        Ok(w) => w,
        Err(_) => {
            report.push("window", -1.0);
            return report;
        }
    };
    let d0 = window.half_width;
    report.push(
        "window",
        (d0 - d1).min(d0 - d2).min(d1).min(d2).min(d1.min(d2) - delta),
    );
    report.push("convex_right", if window.orientation.convex_right() { 1.0 } else { -1.0 });
    report.push("split_count", params.m_split as f64 - 0.5);
    if !report.passes() {
        return report;
    }
    let r = |a: f64, b: f64| model.rankine_hugoniot(m + a, m + b);
    let r1 = r(d1, 0.0);
    let r2 = r(0.0, -d2);
    let fp = model.df(m);

    report.push("d2small1", r1 - r2);
    let worst = (1..GRID_1D)
        .map(|k| {
            let v = (m - d2) + (d1 + d2) * k as f64 / GRID_1D as f64;
            model.rho(v, m - d2, m + d1)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    report.push("d2small2", -worst);

    // Relative speed chain.
    let mut inf_gap = f64::INFINITY;
    let mut inf_2b = f64::INFINITY;
    let mut inf_2c = f64::INFINITY;
    if delta > 0.0 {
        for a in grid(-delta, delta, GRID_2D) {
            for b in grid(-delta, delta, GRID_2D) {
                inf_gap = inf_gap.min(r(d1, a) - r(b, -d2));
                inf_2b = inf_2b.min((r(a, -d2) - r(a, b)).abs());
                inf_2c = inf_2c.min((r(d1, b) - r(a, b)).abs());
            }
        }
    }
    report.push_ge("ucost2", ((r1 - r2) / 2.0 - (r1 - fp) / 4.0).min(inf_gap - (r1 - r2) / 2.0));
    report.push("ucost2b", inf_2b);
    report.push("ucost2c", inf_2c);

    // The shock at s1 must be entropic and the one at s2 single-signed.
    let mut worst3 = f64::NEG_INFINITY;
    let mut sign4_pos = true;
    let mut sign4_neg = true;
    let mut min4 = f64::INFINITY;
    let mid = r(d1, -d2);
    let mut order = f64::INFINITY;
    if delta > 0.0 {
        for w in grid(m - delta, m + delta, GRID_2D) {
            for k in 1..GRID_2D {
                let t = k as f64 / GRID_2D as f64;
                let v3 = w + (m + d1 - w) * t;
                worst3 = worst3.max(model.rho(v3, w, m + d1));
                let v4 = (m - d2) + (w - m + d2) * t;
                let rho4 = model.rho(v4, m - d2, w);
                sign4_pos &= rho4 > 0.0;
                sign4_neg &= rho4 < 0.0;
                min4 = min4.min(rho4.abs());
            }
            order = order
                .min(model.rankine_hugoniot(m + d1, w) - mid)
                .min(mid - model.rankine_hugoniot(w, m - d2));
        }
    } else {
        worst3 = -1.0;
        min4 = 1.0;
        order = 1.0;
    }
    report.push("ucost3", -worst3);
    report.push("ucost4", if sign4_pos || sign4_neg { min4 } else { -min4 });
    report.push("ordering", order);

    if let Ok((weight_max, _)) = window_maxima(model, window.lo(), window.hi()) {
        let c = |a: f64, b: f64| model.c_kernel(m, a, b).unwrap_or(f64::NAN);
        let worst_c = grid(-delta, delta, GRID_1D)
            .map(|a| c(a, -d2).abs())
            .fold(0.0, f64::max);
        let budget = weight_max * (c(d1, 0.0) + worst_c + c(d1, -d2)) / (r1 - fp);
        report.budget = budget;
        if let Some(g) = gamma {
            report.push_ge("ucost1b", g / 8.0 - budget);
        }
    }
    report
}

/// A piece of a boundary curve: position `y0 + speed (t - t0)` on
/// `[t0, t1]`, with `value` the state of the inner solution it faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePiece {
    pub t0: f64,
    pub t1: f64,
    pub y0: f64,
    pub speed: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryCurve {
    pub pieces: Vec<CurvePiece>,
}

impl BoundaryCurve {
    fn piece_at(&self, t: f64) -> Option<&CurvePiece> {
        let k = self.pieces.partition_point(|p| p.t1 < t);
        self.pieces.get(k).or(self.pieces.last())
    }

    pub fn position(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(0.0, |p| p.y0 + p.speed * (t - p.t0))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(f64::NAN, |p| p.value)
    }

    pub fn end_time(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.t1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurves {
    /// Plateau side: faces the inner solution on its right.
    pub s1: BoundaryCurve,
    /// Floor side: faces the inner solution on its left.
    pub s2: BoundaryCurve,
    /// First time with `s1 - s2 = 1`.
    pub meet_time: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    /// Tracks the state right of the curve.
    Right,
    /// Tracks the state left of the curve.
    Left,
}

fn slab_velocity(slab: &Slab, f: &Front) -> f64 {
    if slab.duration > 0.0 {
        (f.x_end - f.x_start) / slab.duration
    } else {
        f.speed
    }
}

fn position_in(slab: &Slab, f: &Front, t: f64) -> f64 {
    f.x_start + slab_velocity(slab, f) * (t - slab.t_start)
}

/// State of the inner solution next to the curve, read from positions.
fn state_beside(slab: &Slab, y: f64, t: f64, side: Side, current: f64) -> f64 {
    let (right, left) = neighbours(slab, y, t, side, current);
    match (side, right, left) {
        (_, None, _) => slab.background,
        (Side::Right, Some((k, _)), _) => slab.fronts[k].left,
        (Side::Left, _, Some((k, _))) => slab.fronts[k].right,
        (Side::Left, Some((k, _)), None) => slab.fronts[k].left,
    }
}

/// Orders a cyclic run of list indices from its head.
fn ordered_run(n: usize, mut members: Vec<usize>) -> Vec<usize> {
    members.sort_unstable();
    let head = members
        .iter()
        .copied()
        .find(|&m| members.binary_search(&((m + n - 1) % n)).is_err())
        .or(members.first().copied())
        .unwrap_or(0);
    members.sort_by_key(|&m| (m + n - head) % n);
    members
}

/// Nearest front on each side as `(index, distance)`.
fn neighbours(
    slab: &Slab,
    y: f64,
    t: f64,
    side: Side,
    current: f64,
) -> (Option<(usize, f64)>, Option<(usize, f64)>) {
    let n = slab.fronts.len();
    if n == 0 {
        return (None, None);
    }
    let dr: Vec<f64> = slab
        .fronts
        .iter()
        .map(|f| {
            let d = wrap_unit(position_in(slab, f, t) - y);
            if 1.0 - d < CONTACT_TOL {
                0.0
            } else {
                d
            }
        })
        .collect();
    let contact: Vec<usize> = (0..n).filter(|&k| dr[k] < CONTACT_TOL).collect();
    let (mut ahead, mut behind) = (Vec::new(), Vec::new());
    if !contact.is_empty() {
        let chain = ordered_run(n, contact);
        // Slot j sits between chain[j - 1] and chain[j].
        let state = |j: usize| {
            if j < chain.len() {
                slab.fronts[chain[j]].left
            } else {
                slab.fronts[chain[j - 1]].right
            }
        };
        let slots = 0..=chain.len();
        let j = match side {
            Side::Right => slots.rev().find(|&j| state(j) == current).unwrap_or(chain.len()),
            Side::Left => slots.clone().find(|&j| state(j) == current).unwrap_or(0),
        };
        behind = chain[..j].to_vec();
        ahead = chain[j..].to_vec();
    }
    let free: Vec<usize> = (0..n).filter(|&k| dr[k] >= CONTACT_TOL).collect();
    let right = match ahead.first() {
        Some(&k) => Some((k, 0.0)),
        None => nearest_run(n, &free, |k| dr[k]).first().map(|&k| (k, dr[k])).or_else(|| {
            behind.first().map(|&k| (k, 1.0))
        }),
    };
    let left = match behind.last() {
        Some(&k) => Some((k, 0.0)),
        None => nearest_run(n, &free, |k| 1.0 - dr[k]).last().map(|&k| (k, 1.0 - dr[k])).or_else(|| {
            ahead.last().map(|&k| (k, 1.0))
        }),
    };
    (right, left)
}

/// Fronts of `pool` tied at the smallest distance, in cyclic order.
fn nearest_run(n: usize, pool: &[usize], dist: impl Fn(usize) -> f64) -> Vec<usize> {
    let Some(dmin) = pool.iter().map(|&k| dist(k)).min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let tied: Vec<usize> = pool.iter().copied().filter(|&k| dist(k) - dmin < CONTACT_TOL).collect();
    ordered_run(n, tied)
}

fn trace_curve(
    w: &SpaceTimeSolution,
    start: f64,
    speed_of: impl Fn(f64) -> f64,
    side: Side,
) -> Result<BoundaryCurve> {
    let mut curve = BoundaryCurve::default();
    let mut y = start;
    let mut events = 0usize;
    let first = match w.slabs().first() {
        Some(s) => s,
        None => return Ok(curve),
    };
    let mut value = state_beside(first, y, 0.0, side, f64::NAN);
    for slab in w.slabs() {
        let mut t = slab.t_start;
        value = state_beside(slab, y, t, side, value);
        while t < slab.t_end {
            let sigma = speed_of(value);
            let (right, left) = neighbours(slab, y, t, side, value);
            let mut hit: Option<(f64, f64)> = None;
            if let Some((k, dr)) = right {
                let c = slab_velocity(slab, &slab.fronts[k]);
                if sigma > c {
                    hit = Some((dr / (sigma - c), slab.fronts[k].right));
                }
            }
            if let Some((k, dl)) = left {
                let c = slab_velocity(slab, &slab.fronts[k]);
                if c > sigma {
                    let dt = dl / (c - sigma);
                    if hit.map_or(true, |(h, _)| dt < h) {
                        hit = Some((dt, slab.fronts[k].left));
                    }
                }
            }
            let crossing = hit.filter(|&(dt, _)| t + dt < slab.t_end);
            let t_next = crossing.map_or(slab.t_end, |(dt, _)| t + dt);
            if t_next > t {
                curve.pieces.push(CurvePiece {
                    t0: t,
                    t1: t_next,
                    y0: y,
                    speed: sigma,
                    value,
                });
                y += sigma * (t_next - t);
                t = t_next;
            }
            let Some((_, new_value)) = crossing else {
                break;
            };
            value = new_value;
            events += 1;
            if events > CURVE_EVENT_BUDGET {
                return Err(Error::StallError { events });
            }
        }
    }
    Ok(curve)
}

/// Traces `s1' = R(d1, w - m)` and `s2' = R(w - m, -d2)` through the
/// slabs of `w`, both starting at `start`.
pub fn boundary_curves(
    model: &FluxModel,
    w: &SpaceTimeSolution,
    m: f64,
    d1: f64,
    d2: f64,
    start: f64,
) -> Result<BoundaryCurves> {
    let (hi, lo) = (m + d1, m - d2);
    let s1 = trace_curve(w, start, |v| model.rankine_hugoniot(hi, v), Side::Right)?;
    let s2 = trace_curve(w, start, |v| model.rankine_hugoniot(v, lo), Side::Left)?;
    let meet_time = first_meeting(&s1, &s2);
    Ok(BoundaryCurves { s1, s2, meet_time })
}

fn first_meeting(s1: &BoundaryCurve, s2: &BoundaryCurve) -> Option<f64> {
    let mut times: Vec<f64> = s1
        .pieces
        .iter()
        .chain(s2.pieces.iter())
        .flat_map(|p| [p.t0, p.t1])
        .collect();
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup();
    for pair in times.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let ga = s1.position(a) - s2.position(a) - 1.0;
        let gb = s1.position(b) - s2.position(b) - 1.0;
        if ga >= 0.0 {
            return Some(a);
        }
        if gb >= 0.0 {
            let rate = (s1.piece_at(0.5 * (a + b)).unwrap().speed)
                - (s2.piece_at(0.5 * (a + b)).unwrap().speed);
            return Some((a - ga / rate).min(b));
        }
    }
    None
}

/// Nucleation point of the curves: middle of the longest piece of `u_i`.
fn nucleation_point(u_i: &PiecewiseConstantProfile) -> f64 {
    let (start, len, _) = u_i
        .pieces()
        .fold((0.0, -1.0, 0.0), |acc, p| if p.1 > acc.1 { p } else { acc });
    start + 0.5 * len
}

/// Builds the connector from `u_i` (mean `m`, within `delta` of `m`) to
/// the constant `m`: the inner splitting evolution glued to a plateau
/// and a floor until the two boundary curves meet, then the absorber.
pub fn connector(
    model: &FluxModel,
    m: f64,
    u_i: &PiecewiseConstantProfile,
    params: &ConnectorParams,
) -> Result<PathPlan> {
    let window = model.convexity_window(m, WINDOW_SCAN, DEFAULT_WINDOW_CAP)?;
    if !window.orientation.convex_right() {
        // Build for -f on the reflected profile and reflect back.
        let flipped = model.negated();
        let plan = connector_convex_right(&flipped, m, &u_i.parity(), params)?;
        let stages = plan
            .stages
            .into_iter()
            .map(|s| -> Result<Stage> {
                let solution = s.solution.mirrored(model.clone());
                let cost = tracker::h_cost(&solution)?;
                Ok(Stage {
                    solution,
                    cost,
                    ..s
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(PathPlan { stages, ..plan });
    }
    connector_convex_right(model, m, u_i, params)
}

fn connector_convex_right(
    model: &FluxModel,
    m: f64,
    u_i: &PiecewiseConstantProfile,
    params: &ConnectorParams,
) -> Result<PathPlan> {
    if (u_i.mean() - m).abs() > 1e-12 {
        return Err(Error::InvalidInput("initial profile must have mean m"));
    }
    if u_i.sup_distance_to(m) > params.delta {
        return Err(Error::InvalidInput("initial profile is farther than delta from m"));
    }
    let report = check_feasibility(model, m, params, None);
    if let Some(name) = report.first_failure() {
        log::debug!("connector infeasible: {name}");
        return Err(Error::InfeasibleParams(name));
    }
    let t_bar = params.horizon(model, m);
    let inner = split_evolution(model, m, u_i, t_bar, params.m_split)?;
    let w = &inner.solution;
    let start = nucleation_point(u_i);
    let curves = boundary_curves(model, w, m, params.d1, params.d2, start)?;
    let t_meet = curves
        .meet_time
        .ok_or(Error::InfeasibleParams("boundary curves do not meet before the horizon"))?;

    let glued = glue(model, m, params, w, &curves, start, t_meet)?;
    let report = check_weak_solution(&glued, 1e-10);
    if !report.passes {
        log::warn!("glued connector fails the weak-solution check: {report:?}");
        return Err(Error::InfeasibleParams("glued connector is not a weak solution"));
    }
    let end = glued.final_profile();
    let (a, b) = plateau(&end, m + params.d1)?;
    let absorber = absorber_between(model, m, params.d1, params.d2, a, b)?;
    let glue_cost = tracker::h_cost(&glued)?;
    let stages = vec![
        Stage {
            name: "connector",
            solution: glued,
            cost: glue_cost,
            linearized_cost: None,
            params: vec![
                ("d1", params.d1),
                ("d2", params.d2),
                ("delta", params.delta),
                ("M", params.m_split as f64),
                ("T_bar", t_bar),
                ("T", t_meet),
                ("inner_cost", inner.cost.total),
            ],
        },
        Stage {
            name: "absorber",
            cost: absorber.cost.clone(),
            solution: absorber.solution,
            linearized_cost: None,
            params: vec![("tau", absorber.tau), ("bound", absorber.bound)],
        },
    ];
    let plan = PathPlan {
        m,
        stages,
        target_w: 0.0,
    };
    plan.concatenated()?;
    Ok(plan)
}

/// Endpoints of the single plateau of a two-valued profile.
fn plateau(p: &PiecewiseConstantProfile, top: f64) -> Result<(f64, f64)> {
    if p.len() != 2 {
        return Err(Error::InfeasibleParams("profile at the meeting time is not two-valued"));
    }
    let k = p
        .values()
        .iter()
        .position(|&v| v == top)
        .ok_or(Error::InfeasibleParams("plateau value missing at the meeting time"))?;
    let a = p.breakpoints()[k];
    Ok((a, a + p.piece_length(k)))
}

fn glue(
    model: &FluxModel,
    m: f64,
    params: &ConnectorParams,
    w: &SpaceTimeSolution,
    curves: &BoundaryCurves,
    start: f64,
    t_meet: f64,
) -> Result<SpaceTimeSolution> {
    let (hi, lo) = (m + params.d1, m - params.d2);
    let r_mid = model.rankine_hugoniot(hi, lo);

    let mut times: Vec<f64> = vec![0.0, t_meet];
    times.extend(w.slabs().iter().map(|s| s.t_end));
    for c in [&curves.s1, &curves.s2] {
        times.extend(c.pieces.iter().map(|p| p.t1));
    }
    times.retain(|&t| t <= t_meet);
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup();

    let mut slabs = Vec::with_capacity(times.len());
    let mut k_slab = 0usize;
    for pair in times.windows(2) {
        let (ta, tb) = (pair[0], pair[1]);
        if tb <= ta {
            continue;
        }
        let tm = 0.5 * (ta + tb);
        while k_slab + 1 < w.slabs().len() && w.slabs()[k_slab].t_end <= tm {
            k_slab += 1;
        }
        let slab = &w.slabs()[k_slab];
        let p1 = curves.s1.piece_at(tm).copied().ok_or(Error::InfeasibleParams("empty curve"))?;
        let p2 = curves.s2.piece_at(tm).copied().ok_or(Error::InfeasibleParams("empty curve"))?;
        let s1 = |t: f64| p1.y0 + p1.speed * (t - p1.t0);
        let s2 = |t: f64| p2.y0 + p2.speed * (t - p2.t0);
        let last = tb == t_meet;

        let mut fronts = Vec::new();
        fronts.push(Front {
            id: ID_S1,
            x_start: s1(ta),
            x_end: s1(tb),
            speed: p1.speed,
            left: hi,
            right: p1.value,
            kind: model.classify(hi, p1.value),
        });
        let lo_edge = s1(tm);
        let n = slab.fronts.len();
        let mut visible: Vec<(f64, usize, Front)> = slab
            .fronts
            .iter()
            .enumerate()
            .filter_map(|(k, f)| {
                let pm = position_in(slab, f, tm);
                let shift = libm::floor(pm - lo_edge);
                let lifted = pm - shift;
                if lifted > lo_edge && lifted < s2(tm) + 1.0 {
                    let front = Front {
                        x_start: position_in(slab, f, ta) - shift,
                        x_end: if last { s1(tb) } else { position_in(slab, f, tb) - shift },
                        ..f.clone()
                    };
                    Some((lifted, k, front))
                } else {
                    None
                }
            })
            .collect();
        let head = ordered_run(n, visible.iter().map(|v| v.1).collect()).first().copied().unwrap_or(0);
        visible.sort_by(|a, b| a.0.total_cmp(&b.0).then(((a.1 + n - head) % n).cmp(&((b.1 + n - head) % n))));
        let visible = visible.into_iter().map(|v| v.2);
        fronts.extend(visible);
        fronts.push(Front {
            id: ID_S2,
            x_start: s2(ta) + 1.0,
            x_end: if last { s1(tb) } else { s2(tb) + 1.0 },
            speed: p2.speed,
            left: p2.value,
            right: lo,
            kind: model.classify(p2.value, lo),
        });
        fronts.push(Front {
            id: ID_MID,
            x_start: start + r_mid * ta + 1.0,
            x_end: start + r_mid * tb + 1.0,
            speed: r_mid,
            left: lo,
            right: hi,
            kind: model.classify(lo, hi),
        });
        slabs.push(Slab::new(tb - ta, fronts, hi));
    }
    let initial = w.initial_profile().clone();
    Ok(SpaceTimeSolution::from_slabs(model.clone(), initial, slabs))
}


#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square(a: f64) -> PiecewiseConstantProfile {
        PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![a, -a]).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let model = FluxModel::cubic();
        assert!(check_feasibility(&model, 0.0, &ConnectorParams::new(0.4, 0.2, 0.05, 16), None).passes());
        let wide = check_feasibility(&model, 0.0, &ConnectorParams::new(0.4, 0.3, 0.05, 16), None);
        assert!(!wide.get("d2small2").unwrap().pass);
        assert!(check_feasibility(&model, 0.0, &ConnectorParams::new(0.4, 0.2, 0.0, 16), None).passes());
    }

    #[test]
    fn straight_curves_over_constant_field() {
        let model = FluxModel::cubic();
        let w = SpaceTimeSolution::from_slabs(
            model.clone(),
            PiecewiseConstantProfile::constant(0.0),
            vec![Slab::new(20.0, Vec::new(), 0.0)],
        );
        let c = boundary_curves(&model, &w, 0.0, 0.4, 0.2, 0.0).unwrap();
        assert_eq!(c.s1.pieces.len(), 1);
        assert!((c.s1.pieces[0].speed + 0.84).abs() < 1e-15);
        assert!((c.s2.pieces[0].speed + 0.96).abs() < 1e-15);
        assert!((c.meet_time.unwrap() - 1.0 / 0.12).abs() < 1e-12);
    }

    #[test]
    fn square_wave_reaches_the_mean() {
        let model = FluxModel::cubic();
        let plan = connector(&model, 0.0, &square(0.05), &ConnectorParams::new(0.4, 0.2, 0.05, 16))
            .unwrap();
        let end = plan.final_profile().unwrap();
        assert!(end.is_constant() && end.values()[0] == 0.0);
        for s in &plan.stages {
            assert!(check_weak_solution(&s.solution, 1e-10).passes, "{}", s.name);
        }
        assert!(plan.concatenated().unwrap().is_some());
    }

    #[test]
    fn concave_right_flux_is_mirrored() {
        let model = FluxModel::cubic().negated();
        let plan = connector(&model, 0.0, &square(0.05), &ConnectorParams::new(0.4, 0.2, 0.05, 16))
            .unwrap();
        assert!(plan.final_profile().unwrap().is_constant());
        assert_eq!(plan.initial_profile().unwrap(), &square(0.05));
    }

    #[test]
    fn tighter_parameters_are_cheaper() {
        let model = FluxModel::cubic();
        let mut last = f64::INFINITY;
        for (d1, m_split) in [(0.2, 8), (0.1, 16), (0.05, 32)] {
            let delta = 0.2 * d1;
            let params = ConnectorParams::new(d1, 0.45 * d1, delta, m_split);
            let plan = connector(&model, 0.0, &square(delta), &params).unwrap();
            assert!(plan.total_cost() < last);
            last = plan.total_cost();
        }
    }
}
