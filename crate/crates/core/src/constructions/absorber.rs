use alloc::vec;

use crate::flux::{FluxModel, DEFAULT_WINDOW_CAP};
use crate::math::wrap_unit;
use crate::profile::PiecewiseConstantProfile;
use crate::tracker::{self, CostReport, Front, Slab, SpaceTimeSolution};
use crate::{Error, Result};

use super::WINDOW_SCAN;

/// Identifiers of the three absorber fronts.
const ID_LOW: u64 = 1 << 40;
const ID_RISE: u64 = ID_LOW + 1;
const ID_DROP: u64 = ID_LOW + 2;

#[derive(Debug, Clone)]
pub struct Absorber {
    /// Plateau `m + d1` of width `d2 / (d1 + d2)` on a floor `m - d2`.
    pub initial: PiecewiseConstantProfile,
    pub solution: SpaceTimeSolution,
    pub tau: f64,
    pub cost: CostReport,
    /// `max(D/sigma) (C(d1, 0)^+ + C(0, -d2)^+) / |R(d1, 0) - R(0, -d2)|`
    /// with the maximum taken over the convexity window.
    pub bound: f64,
}

/// The absorber with plateau centred at `x0`.
pub fn two_shock_absorber(
    model: &FluxModel,
    m: f64,
    d1: f64,
    d2: f64,
    x0: f64,
) -> Result<Absorber> {
    let width = d2 / (d1 + d2);
    absorber_between(model, m, d1, d2, x0 - 0.5 * width, x0 + 0.5 * width)
}

/// Absorber whose plateau occupies `[a, b]` (lifted, `b - a` close to
/// `d2 / (d1 + d2)`).
pub fn absorber_between(
    model: &FluxModel,
    m: f64,
    d1: f64,
    d2: f64,
    a: f64,
    b: f64,
) -> Result<Absorber> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::InvalidInput("absorber amplitudes must be positive"));
    }
    let window = model.convexity_window(m, WINDOW_SCAN, DEFAULT_WINDOW_CAP)?;
    if d1 >= window.half_width || d2 >= window.half_width {
        return Err(Error::InfeasibleParams("absorber amplitudes exceed the convexity window"));
    }
    let (hi, lo) = (m + d1, m - d2);
    let r_rise = model.rankine_hugoniot(hi, m);
    let r_low = model.rankine_hugoniot(m, lo);
    let r_drop = model.rankine_hugoniot(hi, lo);
    if !(r_rise - r_low > 0.0) {
        return Err(Error::InfeasibleParams("fronts of the absorber do not meet"));
    }
    if !drop_is_entropic(model, hi, lo) {
        return Err(Error::InfeasibleParams("middle absorber shock is not entropic"));
    }
    let tau = 1.0 / (r_rise - r_low);

    let a = wrap_unit(a);
    let b = a + (b - a);
    let meet = a + r_rise * tau;
    let fronts = vec![
        Front {
            id: ID_LOW,
            x_start: a,
            x_end: meet - 1.0,
            speed: r_low,
            left: lo,
            right: m,
            kind: model.classify(lo, m),
        },
        Front {
            id: ID_RISE,
            x_start: a,
            x_end: meet,
            speed: r_rise,
            left: m,
            right: hi,
            kind: model.classify(m, hi),
        },
        Front {
            id: ID_DROP,
            x_start: b,
            x_end: meet,
            speed: r_drop,
            left: hi,
            right: lo,
            kind: model.classify(hi, lo),
        },
    ];
    let initial = PiecewiseConstantProfile::from_jumps(&[(a, hi), (b, lo)], 0.0)?;
    let slab = Slab::new(tau, fronts, lo);
    let solution = SpaceTimeSolution::from_slabs(model.clone(), initial.clone(), vec![slab]);
    let cost = tracker::h_cost(&solution)?;
    let (weight_max, _) = super::split::window_maxima(model, window.lo(), window.hi())?;
    let bound = weight_max
        * (model.c_kernel(m, d1, 0.0)?.max(0.0) + model.c_kernel(m, 0.0, -d2)?.max(0.0))
        / (r_rise - r_low).abs();
    Ok(Absorber {
        initial,
        solution,
        tau,
        cost,
        bound,
    })
}

/// `rho(v, lo, hi) < 0` strictly inside `(lo, hi)`.
pub(crate) fn drop_is_entropic(model: &FluxModel, hi: f64, lo: f64) -> bool {
    (1..512).all(|k| {
        let v = lo + (hi - lo) * k as f64 / 512.0;
        model.rho(v, lo, hi) < 0.0
    })
}
