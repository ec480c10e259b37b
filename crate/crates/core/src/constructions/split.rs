use crate::flux::{FluxModel, DEFAULT_WINDOW_CAP};
use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{self, CostReport, FrontKind, Policy, SpaceTimeSolution};
use crate::{Error, Result};

use super::WINDOW_SCAN;

#[derive(Debug, Clone)]
pub struct SplitEvolution {
    pub solution: SpaceTimeSolution,
    pub cost: CostReport,
    /// Jump count of the initial profile.
    pub discontinuities: usize,
    /// Most anti-entropic fronts alive in any slab.
    pub max_anti_entropic: usize,
    /// `T (2N - 1) M K (2a / M)^3` with `K = max(D/sigma) max|f''| / 12` and
    /// `a = |u_i - m|_inf`: a Taylor bound on the cost.
    pub taylor_bound: f64,
    /// `H M^2 / (T (2N - 1))`.
    pub fitted_constant: f64,
}

/// Runs the splitting policy from `u_i` for time `t_bar` with `m_split`
/// steps per costly jump.
pub fn split_evolution(
    model: &FluxModel,
    m: f64,
    u_i: &PiecewiseConstantProfile,
    t_bar: f64,
    m_split: usize,
) -> Result<SplitEvolution> {
    if m_split < 1 {
        return Err(Error::InvalidInput("split count must be at least 1"));
    }
    let window = model.convexity_window(m, WINDOW_SCAN, DEFAULT_WINDOW_CAP)?;
    let amplitude = u_i.sup_distance_to(m);
    if amplitude > window.half_width {
        return Err(Error::WindowViolation {
            value: if u_i.max_value() - m > m - u_i.min_value() {
                u_i.max_value()
            } else {
                u_i.min_value()
            },
            lo: window.lo(),
            hi: window.hi(),
        });
    }
    let solution = tracker::evolve(model, u_i, t_bar, &Policy::Split { window, m: m_split })?;
    let cost = tracker::h_cost(&solution)?;

    let mut max_anti = 0;
    for slab in solution.slabs() {
        for f in &slab.fronts {
            if f.left.max(f.right) - m > amplitude || m - f.left.min(f.right) > amplitude {
                return Err(Error::WindowViolation {
                    value: f.left,
                    lo: m - amplitude,
                    hi: m + amplitude,
                });
            }
        }
        let anti = slab
            .fronts
            .iter()
            .filter(|f| f.kind == FrontKind::AntiEntropic)
            .count();
        max_anti = max_anti.max(anti);
    }

    let n = if u_i.is_constant() { 0 } else { u_i.len() };
    let branches = (2 * n).saturating_sub(1).max(1) as f64;
    let (weight_max, curvature_max) = window_maxima(model, m - amplitude, m + amplitude)?;
    let k = weight_max * curvature_max / 12.0;
    let h = 2.0 * amplitude / m_split as f64;
    let taylor_bound = t_bar * branches * m_split as f64 * k * h * h * h;
    let ms = m_split as f64;
    let fitted_constant = if t_bar > 0.0 {
        cost.total * ms * ms / (t_bar * branches)
    } else {
        0.0
    };
    if cost.total > taylor_bound * (1.0 + 1e-9) + 1e-15 {
        log::warn!("split cost {} above Taylor bound {}", cost.total, taylor_bound);
    }
    Ok(SplitEvolution {
        solution,
        cost,
        discontinuities: n,
        max_anti_entropic: max_anti,
        taylor_bound,
        fitted_constant,
    })
}

/// `(max D/sigma, max |f''|)` over `[lo, hi]` on a 513-point grid.
pub(crate) fn window_maxima(model: &FluxModel, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut w: f64 = 0.0;
    let mut c: f64 = 0.0;
    for k in 0..=512 {
        let v = lo + (hi - lo) * k as f64 / 512.0;
        w = w.max(model.weight(v)?);
        c = c.max(model.d2f(v).abs());
    }
    Ok((w, c))
}
