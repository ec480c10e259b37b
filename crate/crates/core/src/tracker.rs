//! Event-driven front tracking on the torus.
//!
//! A solution is a list of time slabs. Inside a slab every front moves
//! with constant speed from `x_start` to `x_end`; slabs end at
//! interaction events. Positions are stored on the lifted line and read
//! mod 1. Slab times are prefix sums of the stored durations, so
//! reversing a solution twice gives back identical data.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::flux::{ConvexityWindow, EntropyPair, FluxModel};
use crate::profile::PiecewiseConstantProfile;
use crate::riemann::{self, RiemannFan, SPEED_TIE};
use crate::{Error, Result};

pub use crate::flux::FrontKind;

/// Collisions predicted within this time of the earliest one are
/// resolved together.
pub const TIME_TIE: f64 = 1e-13;
/// Fronts closer than this are read as a single jump when a slab is
/// turned back into a profile.
pub const SLAB_FUSE_TOL: f64 = 1e-11;
/// Default slab budget.
pub const DEFAULT_SLAB_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    pub id: u64,
    pub x_start: f64,
    pub x_end: f64,
    pub speed: f64,
    pub left: f64,
    pub right: f64,
    pub kind: FrontKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    pub t_start: f64,
    pub t_end: f64,
    pub duration: f64,
    /// Sorted by `x_start`.
    pub fronts: Vec<Front>,
    /// The state when there are no fronts.
    pub background: f64,
}

impl Slab {
    pub fn new(duration: f64, fronts: Vec<Front>, background: f64) -> Self {
        Slab {
            t_start: 0.0,
            t_end: duration,
            duration,
            fronts,
            background,
        }
    }

    fn profile_with(&self, pos: impl Fn(&Front) -> f64) -> PiecewiseConstantProfile {
        if self.fronts.is_empty() {
            return PiecewiseConstantProfile::constant(self.background);
        }
        // Walk the fronts cyclically from the one after the widest gap, so
        // that coincident fronts keep their order when read mod 1.
        let n = self.fronts.len();
        let xs: Vec<f64> = self.fronts.iter().map(&pos).collect();
        let gap = |k: usize| if k + 1 < n { xs[k + 1] - xs[k] } else { xs[0] + 1.0 - xs[k] };
        let widest = (0..n).max_by(|&a, &b| gap(a).total_cmp(&gap(b))).unwrap_or(0);
        let start = (widest + 1) % n;
        let mut floor = f64::NEG_INFINITY;
        let jumps: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let k = (start + j) % n;
                let lift = if k < start { 1.0 } else { 0.0 };
                // Rounding must not reorder fronts that meet.
                floor = floor.max(xs[k] + lift);
                (floor, self.fronts[k].right)
            })
            .collect();
        PiecewiseConstantProfile::from_jumps(&jumps, SLAB_FUSE_TOL).expect("non-empty")
    }

    pub fn start_profile(&self) -> PiecewiseConstantProfile {
        self.profile_with(|f| f.x_start)
    }

    pub fn end_profile(&self) -> PiecewiseConstantProfile {
        self.profile_with(|f| f.x_end)
    }

    /// `int u dx` read from front positions.
    fn mass_with(&self, pos: impl Fn(&Front) -> f64) -> f64 {
        let n = self.fronts.len();
        if n == 0 {
            return self.background;
        }
        let mut acc = 0.0;
        for k in 0..n {
            let x0 = pos(&self.fronts[k]);
            let x1 = if k + 1 < n {
                pos(&self.fronts[k + 1])
            } else {
                pos(&self.fronts[0]) + 1.0
            };
            acc += self.fronts[k].right * (x1 - x0);
        }
        acc
    }
}

/// How Riemann problems are resolved at interactions.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Entropy solution with states on a grid of spacing at most `mesh`
    /// (plus the initial values).
    Entropic { mesh: f64 },
    /// Entropic jump to the tangency point, then `m` equal costly steps.
    Split { window: ConvexityWindow, m: usize },
    /// One Rankine–Hugoniot jump per interaction.
    SingleShock,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub slab_cap: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            slab_cap: DEFAULT_SLAB_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Horizon,
    Predicate,
}

#[derive(Debug, Clone)]
pub struct SpaceTimeSolution {
    model: FluxModel,
    initial: PiecewiseConstantProfile,
    slabs: Vec<Slab>,
}

impl SpaceTimeSolution {
    /// Assembles a solution; slab times are recomputed from durations.
    pub fn from_slabs(
        model: FluxModel,
        initial: PiecewiseConstantProfile,
        mut slabs: Vec<Slab>,
    ) -> Self {
        let mut t = 0.0;
        for s in &mut slabs {
            s.t_start = t;
            t += s.duration;
            s.t_end = t;
        }
        SpaceTimeSolution {
            model,
            initial,
            slabs,
        }
    }

    /// A solution of zero duration.
    pub fn stationary(model: FluxModel, profile: PiecewiseConstantProfile) -> Self {
        SpaceTimeSolution {
            model,
            initial: profile,
            slabs: Vec::new(),
        }
    }

    pub fn model(&self) -> &FluxModel {
        &self.model
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn t_final(&self) -> f64 {
        self.slabs.last().map_or(0.0, |s| s.t_end)
    }

    pub fn initial_profile(&self) -> &PiecewiseConstantProfile {
        &self.initial
    }

    pub fn final_profile(&self) -> PiecewiseConstantProfile {
        self.slabs
            .last()
            .map_or_else(|| self.initial.clone(), Slab::end_profile)
    }

    pub fn profile_at(&self, t: f64) -> PiecewiseConstantProfile {
        let k = self.slabs.partition_point(|s| s.t_end < t);
        match self.slabs.get(k) {
            None => self.final_profile(),
            Some(s) => {
                let theta = if s.duration > 0.0 {
                    ((t - s.t_start) / s.duration).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                s.profile_with(|f| f.x_start + (f.x_end - f.x_start) * theta)
            }
        }
    }

    pub fn max_front_count(&self) -> usize {
        self.slabs.iter().map(|s| s.fronts.len()).max().unwrap_or(0)
    }

    pub fn with_model(mut self, model: FluxModel) -> Self {
        self.model = model;
        self
    }

    /// Time reversal composed with the reflection `x -> -x`: slabs in
    /// reverse order, traces swapped, speeds kept.
    pub fn reversed(&self) -> Self {
        let slabs = self
            .slabs
            .iter()
            .rev()
            .map(|s| Slab {
                t_start: 0.0,
                t_end: 0.0,
                duration: s.duration,
                background: s.background,
                fronts: s
                    .fronts
                    .iter()
                    .rev()
                    .map(|f| Front {
                        id: f.id,
                        x_start: -f.x_end,
                        x_end: -f.x_start,
                        speed: f.speed,
                        left: f.right,
                        right: f.left,
                        kind: f.kind.flipped(),
                    })
                    .collect(),
            })
            .collect();
        SpaceTimeSolution::from_slabs(self.model.clone(), self.final_profile().parity(), slabs)
    }

    /// Reflection `x -> -x` alone, which carries a solution for flux `f`
    /// to a solution for `-f` (pass the reflected model).
    pub fn mirrored(&self, model: FluxModel) -> Self {
        let slabs = self
            .slabs
            .iter()
            .map(|s| Slab {
                t_start: 0.0,
                t_end: 0.0,
                duration: s.duration,
                background: s.background,
                fronts: s
                    .fronts
                    .iter()
                    .rev()
                    .map(|f| Front {
                        id: f.id,
                        x_start: -f.x_start,
                        x_end: -f.x_end,
                        speed: -f.speed,
                        left: f.right,
                        right: f.left,
                        kind: f.kind,
                    })
                    .collect(),
            })
            .collect();
        SpaceTimeSolution::from_slabs(model, self.initial.parity(), slabs)
    }

    /// `self` followed by `next`; the final profile of `self` must match
    /// the initial profile of `next` in L1 within `1e-12`.
    pub fn concat(&self, next: &SpaceTimeSolution) -> Result<Self> {
        let l1 = self.final_profile().l1_distance(next.initial_profile());
        if !(l1 <= 1e-12) {
            return Err(Error::MismatchedInterface { l1 });
        }
        let mut slabs = self.slabs.clone();
        slabs.extend(next.slabs.iter().cloned());
        Ok(SpaceTimeSolution::from_slabs(
            self.model.clone(),
            self.initial.clone(),
            slabs,
        ))
    }
}

#[derive(Debug, Clone, Copy)]
struct Live {
    id: u64,
    x: f64,
    speed: f64,
    left: f64,
    right: f64,
    kind: FrontKind,
}

enum Solver<'a> {
    Entropic { nodes: Vec<f64> },
    Split { window: &'a ConvexityWindow, m: usize },
    Single,
}

impl Solver<'_> {
    fn solve(&self, model: &FluxModel, left: f64, right: f64) -> Result<RiemannFan> {
        match self {
            Solver::Entropic { nodes } => {
                riemann::entropic_riemann_on_nodes(model, nodes, left, right)
            }
            Solver::Split { window, m } => riemann::split_riemann(model, window, left, right, *m),
            Solver::Single => Ok(riemann::single_shock(model, left, right)),
        }
    }
}

/// Grid `lo + k (hi - lo) / n` with spacing at most `mesh`, merged with
/// `extra` values.
pub fn entropic_nodes(lo: f64, hi: f64, mesh: f64, extra: &[f64]) -> Vec<f64> {
    let mut nodes = Vec::new();
    if hi > lo {
        let n = libm::ceil((hi - lo) / mesh).max(1.0) as usize;
        nodes.extend((0..=n).map(|k| match k {
            0 => lo,
            k if k == n => hi,
            k => lo + (hi - lo) * k as f64 / n as f64,
        }));
    }
    nodes.extend_from_slice(extra);
    nodes.sort_by(|a, b| a.total_cmp(b));
    nodes.dedup();
    nodes
}

struct Tracker<'a> {
    model: &'a FluxModel,
    solver: Solver<'a>,
    fronts: Vec<Live>,
    background: f64,
    next_id: u64,
}

impl<'a> Tracker<'a> {
    fn new(model: &'a FluxModel, p0: &PiecewiseConstantProfile, policy: &'a Policy) -> Result<Self> {
        let solver = match policy {
            Policy::Entropic { mesh } => {
                if !(*mesh > 0.0) {
                    return Err(Error::InvalidInput("mesh must be positive"));
                }
                Solver::Entropic {
                    nodes: entropic_nodes(p0.min_value(), p0.max_value(), *mesh, p0.values()),
                }
            }
            Policy::Split { window, m } => {
                if *m == 0 {
                    return Err(Error::InvalidInput("split count must be at least 1"));
                }
                for &v in p0.values() {
                    window.check(v)?;
                }
                Solver::Split { window, m: *m }
            }
            Policy::SingleShock => Solver::Single,
        };
        let mut tracker = Tracker {
            model,
            solver,
            fronts: Vec::new(),
            background: p0.values()[0],
            next_id: 0,
        };
        let n = p0.len();
        if n > 1 {
            for k in 0..n {
                let left = p0.values()[(k + n - 1) % n];
                let fan = tracker.solver.solve(model, left, p0.values()[k])?;
                let x = p0.breakpoints()[k];
                tracker.push_fan(&fan, x);
            }
        }
        Ok(tracker)
    }

    fn push_fan(&mut self, fan: &RiemannFan, x: f64) {
        for (left, right, speed) in fan.jumps() {
            let kind = self.model.classify(left, right);
            self.fronts.push(Live {
                id: self.next_id,
                x,
                speed,
                left,
                right,
                kind,
            });
            self.next_id += 1;
        }
    }

    fn snapshot(&self) -> Vec<Front> {
        self.fronts
            .iter()
            .map(|f| Front {
                id: f.id,
                x_start: f.x,
                x_end: f.x,
                speed: f.speed,
                left: f.left,
                right: f.right,
                kind: f.kind,
            })
            .collect()
    }

    /// Time until pair `(i, i + 1)` meets (cyclically), or infinity.
    fn pair_hit(&self, i: usize) -> f64 {
        let n = self.fronts.len();
        let a = &self.fronts[i];
        let (b, shift) = if i + 1 < n {
            (&self.fronts[i + 1], 0.0)
        } else {
            (&self.fronts[0], 1.0)
        };
        let closing = a.speed - b.speed;
        if closing <= SPEED_TIE {
            return f64::INFINITY;
        }
        let gap = b.x + shift - a.x;
        (gap / closing).max(0.0)
    }

    fn hits(&self) -> Vec<f64> {
        (0..self.fronts.len()).map(|i| self.pair_hit(i)).collect()
    }

    fn renormalize(&mut self) {
        if let Some(first) = self.fronts.first() {
            if first.x < -1.0 || first.x >= 2.0 {
                let k = libm::floor(first.x);
                for f in &mut self.fronts {
                    f.x -= k;
                }
            }
        }
    }

    /// Rotates the list so that the wrap pair is not part of a collision.
    fn unwrap_clusters(&mut self, colliding: &[bool]) -> bool {
        let n = self.fronts.len();
        if n < 2 || !colliding[n - 1] {
            return false;
        }
        // Cut at the widest free gap so that no fan is split.
        let gap = |i: usize| self.fronts[(i + 1) % n].x + if i + 1 == n { 1.0 } else { 0.0 } - self.fronts[i].x;
        let Some(p) = (0..n - 1)
            .filter(|&i| !colliding[i])
            .max_by(|&a, &b| gap(a).total_cmp(&gap(b)))
        else {
            return false;
        };
        let mut moved: Vec<Live> = self.fronts.drain(..=p).collect();
        for f in &mut moved {
            f.x += 1.0;
        }
        self.fronts.extend(moved);
        true
    }

    fn run(
        mut self,
        t_final: f64,
        opts: EvolveOptions,
        stop: &mut dyn FnMut(f64, &[Front]) -> bool,
    ) -> Result<(Vec<Slab>, StopReason)> {
        let mut slabs: Vec<Slab> = Vec::new();
        let mut t = 0.0;
        let mut events = 0usize;
        if stop(t, &self.snapshot()) {
            return Ok((slabs, StopReason::Predicate));
        }
        while t < t_final {
            if slabs.len() >= opts.slab_cap || events >= 4 * opts.slab_cap {
                return Err(Error::EventBudgetExceeded { slabs: slabs.len() });
            }
            self.renormalize();
            let n = self.fronts.len();
            let mut hits = self.hits();
            let mut earliest = hits.iter().copied().fold(f64::INFINITY, f64::min);
            let mut colliding: Vec<bool> = hits.iter().map(|&h| h <= earliest + TIME_TIE).collect();
            if earliest.is_finite() && colliding.iter().all(|&c| c) {
                // Cannot happen geometrically; drop the slowest pair.
                let (imax, _) = hits
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, &h)| if h > acc.1 { (i, h) } else { acc });
                colliding[imax] = false;
            }
            if earliest.is_finite() && self.unwrap_clusters(&colliding) {
                hits = self.hits();
                earliest = hits.iter().copied().fold(f64::INFINITY, f64::min);
                colliding = hits.iter().map(|&h| h <= earliest + TIME_TIE).collect();
            }
            let remaining = t_final - t;
            let collide = earliest.is_finite() && earliest < remaining;
            let dt = if collide { earliest } else { remaining };

            // Collision clusters: maximal runs of colliding pairs.
            let mut clusters: Vec<(usize, usize, f64)> = Vec::new();
            if collide {
                let mut i = 0;
                while i < n {
                    if i + 1 < n && colliding[i] {
                        let start = i;
                        while i + 1 < n && colliding[i] {
                            i += 1;
                        }
                        let xs = self.fronts[start..=i].iter().map(|f| f.x + f.speed * dt);
                        let xc = xs.sum::<f64>() / (i - start + 1) as f64;
                        clusters.push((start, i, xc));
                    }
                    i += 1;
                }
            }

            let mut fronts: Vec<Front> = self
                .fronts
                .iter()
                .map(|f| Front {
                    id: f.id,
                    x_start: f.x,
                    x_end: f.x + f.speed * dt,
                    speed: f.speed,
                    left: f.left,
                    right: f.right,
                    kind: f.kind,
                })
                .collect();
            for &(a, b, xc) in &clusters {
                for f in &mut fronts[a..=b] {
                    f.x_end = xc;
                }
            }
            for (live, f) in self.fronts.iter_mut().zip(&fronts) {
                live.x = f.x_end;
            }
            if dt > 0.0 {
                slabs.push(Slab {
                    t_start: t,
                    t_end: t + dt,
                    duration: dt,
                    background: self.fronts.first().map_or(self.background, |f| f.left),
                    fronts,
                });
                t += dt;
            }
            if !collide {
                break;
            }
            events += 1;
            for &(a, b, xc) in clusters.iter().rev() {
                let left = self.fronts[a].left;
                let right = self.fronts[b].right;
                let fan = self.solver.solve(self.model, left, right)?;
                let mut fresh = Tracker {
                    model: self.model,
                    solver: Solver::Single,
                    fronts: Vec::new(),
                    background: left,
                    next_id: self.next_id,
                };
                fresh.push_fan(&fan, xc);
                self.next_id = fresh.next_id;
                self.fronts.splice(a..=b, fresh.fronts);
                if self.fronts.is_empty() {
                    self.background = left;
                }
            }
            if stop(t, &self.snapshot()) {
                return Ok((slabs, StopReason::Predicate));
            }
        }
        Ok((slabs, StopReason::Horizon))
    }
}

/// Tracks `p0` up to `t_final` under `policy`.
pub fn evolve(
    model: &FluxModel,
    p0: &PiecewiseConstantProfile,
    t_final: f64,
    policy: &Policy,
) -> Result<SpaceTimeSolution> {
    evolve_until(model, p0, t_final, policy, EvolveOptions::default(), &mut |_, _| false)
        .map(|(sol, _)| sol)
}

/// Like [`evolve`], also checking `stop(t, fronts)` at the start and after
/// every interaction; stops there when it returns true.
pub fn evolve_until(
    model: &FluxModel,
    p0: &PiecewiseConstantProfile,
    t_final: f64,
    policy: &Policy,
    opts: EvolveOptions,
    stop: &mut dyn FnMut(f64, &[Front]) -> bool,
) -> Result<(SpaceTimeSolution, StopReason)> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidInput("final time must be finite and non-negative"));
    }
    let tracker = Tracker::new(model, p0, policy)?;
    let (slabs, reason) = tracker.run(t_final, opts, stop)?;
    let sol = SpaceTimeSolution::from_slabs(model.clone(), p0.clone(), slabs);
    Ok((sol, reason))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub slab: usize,
    pub front_id: u64,
    pub duration: f64,
    pub left: f64,
    pub right: f64,
    pub rate: f64,
    pub signed_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    /// `H`: sum of duration times shock cost rate.
    pub total: f64,
    /// Sum of duration times the positive part of the Einstein entropy
    /// production rate.
    pub jv: f64,
    /// Sum of duration times the signed production rate.
    pub signed_total: f64,
    pub rows: Vec<CostRow>,
}

/// Costs of `sol` priced with its own model.
pub fn h_cost(sol: &SpaceTimeSolution) -> Result<CostReport> {
    h_cost_under(sol, sol.model())
}

/// Costs of the fronts of `sol` priced with `model`.
pub fn h_cost_under(sol: &SpaceTimeSolution, model: &FluxModel) -> Result<CostReport> {
    let m = sol.initial_profile().mean().clamp(-0.999, 0.999);
    let entropy = model.einstein_entropy(m)?;
    let mut cache: BTreeMap<(u64, u64), (f64, f64)> = BTreeMap::new();
    let mut report = CostReport {
        total: 0.0,
        jv: 0.0,
        signed_total: 0.0,
        rows: Vec::new(),
    };
    for (k, slab) in sol.slabs().iter().enumerate() {
        for f in &slab.fronts {
            let key = (f.left.to_bits(), f.right.to_bits());
            let (rate, signed) = match cache.get(&key) {
                Some(&v) => v,
                None => {
                    let v = (
                        model.shock_cost_rate(f.left, f.right)?,
                        model.h_production_rate(&entropy, f.left, f.right)?,
                    );
                    cache.insert(key, v);
                    v
                }
            };
            report.total += slab.duration * rate;
            report.jv += slab.duration * signed.max(0.0);
            report.signed_total += slab.duration * signed;
            report.rows.push(CostRow {
                slab: k,
                front_id: f.id,
                duration: slab.duration,
                left: f.left,
                right: f.right,
                rate,
                signed_rate: signed,
            });
        }
    }
    Ok(report)
}

/// Signed entropy production of `sol` for an arbitrary pair.
pub fn entropy_production(sol: &SpaceTimeSolution, pair: &impl EntropyPair) -> Result<f64> {
    let model = sol.model();
    let mut acc = 0.0;
    for slab in sol.slabs() {
        for f in &slab.fronts {
            acc += slab.duration * model.h_production_rate(pair, f.left, f.right)?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakSolutionReport {
    pub max_rh_residual: f64,
    pub max_mass_drift: f64,
    /// Largest L1 gap between the end of a slab and the start of the next.
    pub max_continuity_gap: f64,
    /// Adjacent fronts disagreeing on their shared state.
    pub trace_mismatches: usize,
    pub passes: bool,
}

/// Checks Rankine–Hugoniot speeds, conservation of mass, continuity
/// across slab boundaries and consistency of adjacent traces.
pub fn check_weak_solution(sol: &SpaceTimeSolution, tol: f64) -> WeakSolutionReport {
    let model = sol.model();
    let m0 = sol.initial_profile().mean();
    let mut rh: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut gap: f64 = 0.0;
    let mut mismatches = 0;
    let mut prev_end: Option<PiecewiseConstantProfile> = Some(sol.initial_profile().clone());
    for slab in sol.slabs() {
        let n = slab.fronts.len();
        for (k, f) in slab.fronts.iter().enumerate() {
            rh = rh.max((f.speed - model.rankine_hugoniot(f.left, f.right)).abs());
            let next = &slab.fronts[(k + 1) % n];
            if f.right != next.left {
                mismatches += 1;
            }
        }
        drift = drift
            .max((slab.mass_with(|f| f.x_start) - m0).abs())
            .max((slab.mass_with(|f| f.x_end) - m0).abs());
        let start = slab.start_profile();
        if let Some(p) = prev_end.take() {
            gap = gap.max(p.l1_distance(&start));
        }
        prev_end = Some(slab.end_profile());
    }
    WeakSolutionReport {
        max_rh_residual: rh,
        max_mass_drift: drift,
        max_continuity_gap: gap,
        trace_mismatches: mismatches,
        passes: rh <= tol && drift <= tol && gap <= tol && mismatches == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::DEFAULT_WINDOW_CAP;
    use alloc::vec;

    fn square(a: f64) -> PiecewiseConstantProfile {
        PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![a, -a]).unwrap()
    }

    #[test]
    fn burgers_shock_is_stationary_and_free() {
        let model = FluxModel::burgers();
        let p = PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![-0.2, 0.2]).unwrap();
        // Shock at 0 (speed 0), rarefaction at 0.5.
        let sol = evolve(&model, &p, 0.5, &Policy::Entropic { mesh: 0.05 }).unwrap();
        let report = check_weak_solution(&sol, 1e-12);
        assert!(report.passes, "{report:?}");
        let shock = sol.slabs()[0]
            .fronts
            .iter()
            .find(|f| f.left == 0.2 && f.right == -0.2)
            .unwrap();
        assert_eq!(shock.speed, 0.0);
        assert_eq!(shock.kind, FrontKind::Entropic);
    }

    #[test]
    fn single_pair_annihilates() {
        let model = FluxModel::burgers();
        // Fronts at 0 (speed 0.25) and 0.5 (speed 0.25) never meet.
        let p = PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![0.5, 0.0]).unwrap();
        let sol = evolve(&model, &p, 1.0, &Policy::SingleShock).unwrap();
        assert_eq!(sol.slabs().len(), 1);
        // Fronts with different speeds meet and cancel.
        let q = PiecewiseConstantProfile::new(vec![0.0, 0.1, 0.2], vec![0.5, 0.0, 0.0]).unwrap();
        assert_eq!(q.len(), 2);
        let _ = evolve(&model, &q, 1.0, &Policy::SingleShock).unwrap();
    }

    #[test]
    fn entropic_square_wave_decays() {
        let model = FluxModel::burgers();
        let p = square(0.2);
        let sol = evolve(&model, &p, 20.0, &Policy::Entropic { mesh: 0.02 }).unwrap();
        let report = check_weak_solution(&sol, 1e-12);
        assert!(report.passes, "{report:?}");
        let end = sol.final_profile();
        assert!(end.sup_distance_to(0.0) < 0.1, "{:?}", end);
        assert!((end.mean() - p.mean()).abs() < 1e-12);
    }

    #[test]
    fn double_reversal_is_identity() {
        let model = FluxModel::cubic();
        let w = model.convexity_window(0.0, 400, DEFAULT_WINDOW_CAP).unwrap();
        let p = PiecewiseConstantProfile::new(vec![0.1, 0.4, 0.7], vec![0.2, -0.1, 0.05]).unwrap();
        let sol = evolve(&model, &p, 3.0, &Policy::Split { window: w, m: 4 }).unwrap();
        let back = sol.reversed().reversed();
        assert_eq!(back.slabs(), sol.slabs());
        assert_eq!(back.initial_profile(), sol.initial_profile());
    }

    #[test]
    fn reversal_keeps_weak_solution() {
        let model = FluxModel::cubic();
        let w = model.convexity_window(0.0, 400, DEFAULT_WINDOW_CAP).unwrap();
        let sol = evolve(&model, &square(0.2), 2.0, &Policy::Split { window: w, m: 4 }).unwrap();
        let rev = sol.reversed();
        let report = check_weak_solution(&rev, 1e-12);
        assert!(report.passes, "{report:?}");
        assert!(rev.initial_profile().l1_distance(&sol.final_profile().parity()) < 1e-12);
        assert!(rev.final_profile().l1_distance(&sol.initial_profile().parity()) < 1e-12);
    }

    #[test]
    fn concat_requires_matching_interface() {
        let model = FluxModel::burgers();
        let a = evolve(&model, &square(0.2), 0.3, &Policy::Entropic { mesh: 0.05 }).unwrap();
        let b = evolve(&model, &a.final_profile(), 0.3, &Policy::Entropic { mesh: 0.05 }).unwrap();
        let ab = a.concat(&b).unwrap();
        assert!((ab.t_final() - 0.6).abs() < 1e-15);
        let c = evolve(&model, &square(0.1), 0.3, &Policy::Entropic { mesh: 0.05 }).unwrap();
        assert!(matches!(a.concat(&c), Err(Error::MismatchedInterface { .. })));
    }

    #[test]
    fn stop_predicate_halts_tracking() {
        let model = FluxModel::burgers();
        let (sol, reason) = evolve_until(
            &model,
            &square(0.2),
            100.0,
            &Policy::Entropic { mesh: 0.02 },
            EvolveOptions::default(),
            &mut |_, fronts| fronts.iter().all(|f| f.left.abs() <= 0.05),
        )
        .unwrap();
        assert_eq!(reason, StopReason::Predicate);
        assert!(sol.t_final() < 100.0);
        assert!(sol.final_profile().sup_distance_to(0.0) <= 0.05 + 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let model = FluxModel::burgers();
        let out = evolve_until(
            &model,
            &square(0.2),
            100.0,
            &Policy::Entropic { mesh: 0.01 },
            EvolveOptions { slab_cap: 3 },
            &mut |_, _| false,
        );
        assert!(matches!(out, Err(Error::EventBudgetExceeded { .. })));
    }
}
