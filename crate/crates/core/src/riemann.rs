//! Local Riemann solvers producing fans of constant states.

use alloc::vec::Vec;

use crate::flux::{ConvexityWindow, FluxModel};
use crate::{Error, Result};

/// Speeds closer than this are treated as equal.
pub const SPEED_TIE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanFront {
    pub speed: f64,
    /// State to the right of this front.
    pub right: f64,
}

/// The self-similar answer to a Riemann problem: a left state followed
/// by fronts of non-decreasing speed.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFan {
    pub left: f64,
    pub fronts: Vec<FanFront>,
}

impl RiemannFan {
    pub fn empty(state: f64) -> Self {
        RiemannFan {
            left: state,
            fronts: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }

    pub fn right(&self) -> f64 {
        self.fronts.last().map_or(self.left, |f| f.right)
    }

    pub fn speeds(&self) -> impl Iterator<Item = f64> + '_ {
        self.fronts.iter().map(|f| f.speed)
    }

    /// `(left, right, speed)` of every front.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut prev = self.left;
        self.fronts.iter().map(move |f| {
            let l = prev;
            prev = f.right;
            (l, f.right, f.speed)
        })
    }

    fn push(&mut self, model: &FluxModel, right: f64) {
        let left = self.right();
        if right != left {
            self.fronts.push(FanFront {
                speed: model.rankine_hugoniot(left, right),
                right,
            });
        }
    }

    fn check_monotone(&self) -> Result<()> {
        for w in self.fronts.windows(2) {
            if w[1].speed < w[0].speed - SPEED_TIE {
                return Err(Error::NonMonotoneSpeeds {
                    left: w[0].speed,
                    right: w[1].speed,
                });
            }
        }
        Ok(())
    }
}

/// True when the single jump `u_minus -> w` satisfies the entropy
/// condition.
fn admissible_jump(model: &FluxModel, u_minus: f64, w: f64) -> bool {
    const GRID: usize = 512;
    if w == u_minus {
        return true;
    }
    let s = model.rankine_hugoniot(u_minus, w);
    let (d_left, d_w) = (model.df(u_minus), model.df(w));
    let dtol = 1e-14 * (1.0 + s.abs() + d_left.abs() + d_w.abs());
    if d_w > s + dtol || d_left < s - dtol {
        return false;
    }
    let jump = (w - u_minus).abs();
    let scale = jump * jump * jump * (1.0 + model.d2f(u_minus).abs() + model.d2f(w).abs());
    let rtol = 1e-12 * scale;
    (1..GRID).all(|k| {
        let v = u_minus + (w - u_minus) * k as f64 / GRID as f64;
        model.rho(v, w, u_minus) <= rtol
    })
}

/// Farthest state `U` between `u_minus` and `u_plus` such that the jump
/// `u_minus -> U` is entropic. Equals `u_minus` when no nontrivial
/// admissible jump in that direction exists and `u_plus` when the whole
/// jump is admissible.
pub fn tangency_point(
    model: &FluxModel,
    window: &ConvexityWindow,
    u_minus: f64,
    u_plus: f64,
) -> Result<f64> {
    window.check(u_minus)?;
    window.check(u_plus)?;
    if u_minus == u_plus || admissible_jump(model, u_minus, u_plus) {
        return Ok(u_plus);
    }
    let (mut lo, mut hi) = (u_minus, u_plus);
    let resolution = 1e-12 * (1.0 + (u_plus - u_minus).abs());
    while (hi - lo).abs() > resolution {
        let mid = 0.5 * (lo + hi);
        if admissible_jump(model, u_minus, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(refine_tangency(model, u_minus, u_plus, lo))
}

/// Polishes a tangency estimate on the sign change of `f[u-, U, U]`,
/// which is evaluated without cancellation.
fn refine_tangency(model: &FluxModel, u_minus: f64, u_plus: f64, guess: f64) -> f64 {
    let q = |x: f64| model.flux.second_divided(u_minus, x, x);
    let dir = if u_plus > u_minus { 1.0 } else { -1.0 };
    let step = 1e-6 * (1.0 + (u_plus - u_minus).abs());
    let clamp = |x: f64| {
        if dir > 0.0 {
            x.clamp(u_minus, u_plus)
        } else {
            x.clamp(u_plus, u_minus)
        }
    };
    let (mut a, mut b) = (clamp(guess - dir * step), clamp(guess + dir * step));
    let qa = q(a);
    if a == u_minus || !(qa * q(b) < 0.0) {
        return guess;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if q(mid) * qa > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// One entropic jump to the tangency point, then `m_split` equal steps to
/// `u_plus`, each travelling with its Rankine–Hugoniot speed.
pub fn split_riemann(
    model: &FluxModel,
    window: &ConvexityWindow,
    u_minus: f64,
    u_plus: f64,
    m_split: usize,
) -> Result<RiemannFan> {
    if m_split == 0 {
        return Err(Error::InvalidInput("split count must be at least 1"));
    }
    let mut fan = RiemannFan::empty(u_minus);
    if u_minus == u_plus {
        return Ok(fan);
    }
    let tangency = tangency_point(model, window, u_minus, u_plus)?;
    fan.push(model, tangency);
    if tangency != u_plus {
        for k in 1..=m_split {
            let v = if k == m_split {
                u_plus
            } else {
                tangency + (u_plus - tangency) * (k as f64 / m_split as f64)
            };
            fan.push(model, v);
        }
    }
    fan.check_monotone()?;
    Ok(fan)
}

/// Entropy solution on the nodes `lo + k (hi - lo) / n` with spacing at
/// most `mesh`: the convex (upward jump) or concave (downward jump)
/// envelope of the flux restricted to those nodes.
pub fn entropic_riemann(
    model: &FluxModel,
    u_minus: f64,
    u_plus: f64,
    mesh: f64,
) -> Result<RiemannFan> {
    if !(mesh > 0.0) {
        return Err(Error::InvalidInput("mesh must be positive"));
    }
    if u_minus == u_plus {
        return Ok(RiemannFan::empty(u_minus));
    }
    let (lo, hi) = if u_minus < u_plus {
        (u_minus, u_plus)
    } else {
        (u_plus, u_minus)
    };
    let n = libm::ceil((hi - lo) / mesh).max(1.0) as usize;
    let nodes: Vec<f64> = (0..=n)
        .map(|k| match k {
            0 => lo,
            k if k == n => hi,
            k => lo + (hi - lo) * k as f64 / n as f64,
        })
        .collect();
    entropic_riemann_on_nodes(model, &nodes, u_minus, u_plus)
}

/// Entropic envelope over the given sorted node set; `u_minus` and
/// `u_plus` are always included as nodes.
pub fn entropic_riemann_on_nodes(
    model: &FluxModel,
    nodes: &[f64],
    u_minus: f64,
    u_plus: f64,
) -> Result<RiemannFan> {
    if u_minus == u_plus {
        return Ok(RiemannFan::empty(u_minus));
    }
    let (lo, hi) = if u_minus < u_plus {
        (u_minus, u_plus)
    } else {
        (u_plus, u_minus)
    };
    let start = nodes.partition_point(|&x| x <= lo);
    let end = nodes.partition_point(|&x| x < hi);
    let mut seq: Vec<f64> = Vec::with_capacity(end.saturating_sub(start) + 2);
    seq.push(u_minus);
    if u_minus < u_plus {
        seq.extend_from_slice(&nodes[start..end.max(start)]);
    } else {
        seq.extend(nodes[start..end.max(start)].iter().rev());
    }
    seq.push(u_plus);

    // Chain with strictly increasing secant slopes along the traversal.
    let mut chain: Vec<(f64, f64)> = Vec::with_capacity(seq.len());
    for &x in &seq {
        let mut slope_in = f64::NEG_INFINITY;
        while let Some(&(last, last_slope)) = chain.last() {
            let s = model.rankine_hugoniot(last, x);
            if chain.len() >= 2 && s <= last_slope + SPEED_TIE {
                chain.pop();
                continue;
            }
            slope_in = s;
            break;
        }
        chain.push((x, slope_in));
    }
    let mut fan = RiemannFan::empty(u_minus);
    for &(x, _) in chain.iter().skip(1) {
        fan.push(model, x);
    }
    fan.check_monotone()?;
    Ok(fan)
}

/// A single Rankine–Hugoniot jump, whatever its entropy status.
pub fn single_shock(model: &FluxModel, u_minus: f64, u_plus: f64) -> RiemannFan {
    let mut fan = RiemannFan::empty(u_minus);
    fan.push(model, u_plus);
    fan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{FrontKind, DEFAULT_WINDOW_CAP};

    fn cubic_window() -> (FluxModel, ConvexityWindow) {
        let model = FluxModel::cubic();
        let w = model.convexity_window(0.0, 400, DEFAULT_WINDOW_CAP).unwrap();
        (model, w)
    }

    #[test]
    fn cubic_tangency_point() {
        let (model, w) = cubic_window();
        let u = tangency_point(&model, &w, -0.4, 0.4).unwrap();
        assert!((u - 0.2).abs() < 1e-9, "{u}");
        let d = tangency_point(&model, &w, 0.4, -0.4).unwrap();
        assert!((d + 0.2).abs() < 1e-9, "{d}");
    }

    #[test]
    fn convex_tangency_is_left_state() {
        let model = FluxModel::burgers();
        let w = model.convexity_window(0.0, 400, DEFAULT_WINDOW_CAP).unwrap();
        assert_eq!(tangency_point(&model, &w, -0.3, 0.2).unwrap(), -0.3);
        assert_eq!(tangency_point(&model, &w, 0.3, -0.2).unwrap(), -0.2);
    }

    #[test]
    fn split_fan_structure() {
        let model = FluxModel::burgers();
        let w = model.convexity_window(0.0, 400, DEFAULT_WINDOW_CAP).unwrap();
        let fan = split_riemann(&model, &w, -0.2, 0.2, 8).unwrap();
        assert_eq!(fan.len(), 8);
        for (l, r, s) in fan.jumps() {
            assert_eq!(s, model.rankine_hugoniot(l, r));
            assert_eq!(model.classify(l, r), FrontKind::AntiEntropic);
        }
        let shock = split_riemann(&model, &w, 0.2, -0.2, 8).unwrap();
        assert_eq!(shock.len(), 1);
        assert_eq!(shock.right(), -0.2);
    }

    #[test]
    fn split_fan_cubic_has_entropic_head() {
        let (model, w) = cubic_window();
        let fan = split_riemann(&model, &w, -0.4, 0.4, 4).unwrap();
        assert_eq!(fan.len(), 5);
        let jumps: Vec<_> = fan.jumps().collect();
        assert_eq!(model.classify(jumps[0].0, jumps[0].1), FrontKind::Entropic);
        for j in &jumps[1..] {
            assert_eq!(model.classify(j.0, j.1), FrontKind::AntiEntropic);
        }
    }

    #[test]
    fn split_rejects_values_outside_window() {
        let model = FluxModel::cubic();
        let w = model.convexity_window(0.3, 400, DEFAULT_WINDOW_CAP).unwrap();
        assert!(matches!(
            split_riemann(&model, &w, 0.3, -0.1, 4),
            Err(Error::WindowViolation { .. })
        ));
        assert!(matches!(
            split_riemann(&model, &w, 0.3, 0.4, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn entropic_burgers_rarefaction_and_shock() {
        let model = FluxModel::burgers();
        let fan = entropic_riemann(&model, -0.2, 0.2, 0.01).unwrap();
        assert_eq!(fan.len(), 40);
        let speeds: Vec<f64> = fan.speeds().collect();
        assert!(speeds.windows(2).all(|w| w[1] > w[0]));
        let shock = entropic_riemann(&model, 0.2, -0.2, 0.01).unwrap();
        assert_eq!(shock.len(), 1);
        assert_eq!(shock.fronts[0].speed, 0.0);
    }

    #[test]
    fn entropic_cubic_composite_wave() {
        // Upward jump across the inflection point: shock from -0.4 to the
        // tangency node near 0.2, then a rarefaction.
        let model = FluxModel::cubic();
        let fan = entropic_riemann(&model, -0.4, 0.4, 0.001).unwrap();
        let first = fan.fronts[0];
        assert!((first.right - 0.2).abs() <= 1e-3);
        assert!(fan.len() > 150);
    }
}
