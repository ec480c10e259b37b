//! The flux/diffusion/mobility triple and the scalar kernels derived
//! from it.
//!
//! Trace convention: `u_minus` is always the left spatial trace of a
//! jump and `u_plus` the right one. The kernel
//! `rho(v, u_plus, u_minus)` is positive where the chord joining the
//! traces lies above the flux graph for an upward jump (and the mirror
//! statement for a downward one); its positive part, weighted by
//! `D / sigma`, is what a shock costs per unit time.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::poly::Polynomial;
use crate::quadrature;
use crate::{Error, Result};

/// Default absolute quadrature tolerance.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Default cap on the half width of a convexity window.
pub const DEFAULT_WINDOW_CAP: f64 = 0.5;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth scalar function supplied with its first two derivatives.
#[derive(Clone)]
pub struct CustomCurve {
    pub value: ScalarFn,
    pub d1: ScalarFn,
    pub d2: ScalarFn,
}

impl fmt::Debug for CustomCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomCurve(..)")
    }
}

/// Continuous piecewise-linear interpolant through `(xs[i], ys[i])`,
/// extended linearly beyond the end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::InvalidInput("piecewise-linear curve needs >= 2 matching nodes"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("piecewise-linear nodes must increase strictly"));
        }
        Ok(PiecewiseLinear { xs, ys })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn node_values(&self) -> &[f64] {
        &self.ys
    }

    fn segment(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&n| n <= x);
        k.clamp(1, self.xs.len() - 1) - 1
    }

    fn slope(&self, k: usize) -> f64 {
        (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        if x == self.xs[k] {
            return self.ys[k];
        }
        if x == self.xs[k + 1] {
            return self.ys[k + 1];
        }
        self.ys[k] + self.slope(k) * (x - self.xs[k])
    }

    /// Right derivative.
    pub fn d1(&self, x: f64) -> f64 {
        self.slope(self.segment(x))
    }

    /// Nodes strictly inside `(a, b)`.
    pub fn kinks_between(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.xs.iter().copied().filter(move |&x| x > lo && x < hi)
    }
}

/// A scalar function of the density.
#[derive(Debug, Clone)]
pub enum Curve {
    Poly {
        p: Polynomial,
        d1: Polynomial,
        d2: Polynomial,
    },
    Linear(PiecewiseLinear),
    Custom(CustomCurve),
}

impl Curve {
    pub fn poly(p: Polynomial) -> Self {
        let d1 = p.derivative();
        let d2 = d1.derivative();
        Curve::Poly { p, d1, d2 }
    }

    pub fn constant(c: f64) -> Self {
        Curve::poly(Polynomial::constant(c))
    }

    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Curve::Custom(CustomCurve {
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Curve::Poly { p, .. } => p.eval(x),
            Curve::Linear(l) => l.eval(x),
            Curve::Custom(c) => (c.value)(x),
        }
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        match self {
            Curve::Poly { d1, .. } => d1.eval(x),
            Curve::Linear(l) => l.d1(x),
            Curve::Custom(c) => (c.d1)(x),
        }
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        match self {
            Curve::Poly { d2, .. } => d2.eval(x),
            Curve::Linear(_) => 0.0,
            Curve::Custom(c) => (c.d2)(x),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Curve::Poly { p, .. } => Some(p),
            _ => None,
        }
    }

    fn negated(&self) -> Curve {
        match self {
            Curve::Poly { p, .. } => Curve::poly(p.scale(-1.0)),
            Curve::Linear(l) => Curve::Linear(PiecewiseLinear {
                xs: l.xs.clone(),
                ys: l.ys.iter().map(|y| -y).collect(),
            }),
            Curve::Custom(c) => {
                let (v, d1, d2) = (c.value.clone(), c.d1.clone(), c.d2.clone());
                Curve::custom(move |x| -v(x), move |x| -d1(x), move |x| -d2(x))
            }
        }
    }

    /// Exact first divided difference `(f(a) - f(b)) / (a - b)`, with the
    /// derivative at `a == b`. Symmetric in its arguments.
    fn secant(&self, a: f64, b: f64) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == b {
            return self.d1(a);
        }
        match self {
            Curve::Poly { p, .. } => {
                // x^k -> sum_{j<k} a^j b^(k-1-j), built by q_k = a q_{k-1} + b^(k-1).
                let mut acc = 0.0;
                let mut q = 0.0;
                let mut b_pow = 1.0;
                for &c in p.coeffs().iter().skip(1) {
                    q = a * q + b_pow;
                    b_pow *= b;
                    acc += c * q;
                }
                acc
            }
            Curve::Linear(l) => {
                let (ka, kb) = (l.segment(a), l.segment(b));
                if ka == kb || (kb == ka + 1 && b == l.xs[kb]) {
                    l.slope(ka)
                } else {
                    (l.eval(b) - l.eval(a)) / (b - a)
                }
            }
            Curve::Custom(c) => ((c.value)(b) - (c.value)(a)) / (b - a),
        }
    }

    /// Second divided difference `f[a, v, b]`, symmetric in its arguments.
    pub(crate) fn second_divided(&self, a: f64, v: f64, b: f64) -> f64 {
        let mut s = [a, v, b];
        s.sort_by(|x, y| x.total_cmp(y));
        let [x, y, z] = s;
        match self {
            Curve::Poly { p, d2, .. } => {
                if x == z {
                    return 0.5 * d2.eval(x);
                }
                // x^k -> complete homogeneous polynomial h_{k-2}(x, y, z).
                let deg = p.degree();
                if deg < 2 {
                    return 0.0;
                }
                let mut h_yz = Vec::with_capacity(deg - 1);
                let (mut prev, mut z_pow) = (1.0, 1.0);
                h_yz.push(1.0);
                for _ in 1..=deg - 2 {
                    z_pow *= z;
                    prev = y * prev + z_pow;
                    h_yz.push(prev);
                }
                let mut acc = 0.0;
                for (k, &c) in p.coeffs().iter().enumerate().skip(2) {
                    let j = k - 2;
                    let mut x_pow = 1.0;
                    let mut h = 0.0;
                    for i in 0..=j {
                        h += x_pow * h_yz[j - i];
                        x_pow *= x;
                    }
                    acc += c * h;
                }
                acc
            }
            _ => {
                if x == z {
                    return 0.5 * self.d2(x);
                }
                (self.secant(y, z) - self.secant(x, y)) / (z - x)
            }
        }
    }
}

/// Convexity pattern of the flux around a reference density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexityCase {
    /// Same strict convexity on both sides.
    A,
    /// Opposite convexity on the two sides.
    B,
}

/// Which side is convex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Convex,
    Concave,
    ConcaveLeftConvexRight,
    ConvexLeftConcaveRight,
}

impl Orientation {
    /// True when the flux is strictly convex on the right half-window.
    pub fn convex_right(self) -> bool {
        matches!(self, Orientation::Convex | Orientation::ConcaveLeftConvexRight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityWindow {
    pub center: f64,
    pub half_width: f64,
    pub case: ConvexityCase,
    pub orientation: Orientation,
}

impl ConvexityWindow {
    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, v: f64) -> bool {
        let slack = 1e-12;
        v >= self.lo() - slack && v <= self.hi() + slack
    }

    pub fn check(&self, v: f64) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::WindowViolation {
                value: v,
                lo: self.lo(),
                hi: self.hi(),
            })
        }
    }
}

/// Sign pattern of `rho` across a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontKind {
    /// `rho <= 0` on the trace interval: no cost.
    Entropic,
    /// `rho >= 0` on the trace interval.
    AntiEntropic,
    /// `rho` changes sign.
    Mixed,
}

impl FrontKind {
    /// Kind of the same jump seen with its traces swapped.
    pub fn flipped(self) -> Self {
        match self {
            FrontKind::Entropic => FrontKind::AntiEntropic,
            FrontKind::AntiEntropic => FrontKind::Entropic,
            FrontKind::Mixed => FrontKind::Mixed,
        }
    }
}

/// An entropy `h` with its conjugate flux `g` (`g' = h' f'`).
pub trait EntropyPair {
    fn entropy(&self, v: f64) -> Result<f64>;
    fn entropy_flux(&self, v: f64) -> Result<f64>;
    fn entropy_d2(&self, v: f64) -> Result<f64>;
}

/// The flux `f`, diffusion `D` and mobility `sigma` on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct FluxModel {
    pub flux: Curve,
    pub diffusion: Curve,
    pub mobility: Curve,
    pub quad_tol: f64,
    /// Interval on which `sigma > 0` is required.
    pub working: (f64, f64),
}

const VALIDATION_POINTS: usize = 101;

impl FluxModel {
    pub fn new(flux: Curve, diffusion: Curve, mobility: Curve) -> Result<Self> {
        let model = FluxModel {
            flux,
            diffusion,
            mobility,
            quad_tol: DEFAULT_QUAD_TOL,
            working: (-1.0, 1.0),
        };
        model.validate()?;
        Ok(model)
    }

    /// `f(u) = u^2 / 2`, `D = sigma = 1`.
    pub fn burgers() -> Self {
        FluxModel::polynomial(&[0.0, 0.0, 0.5], &[1.0], &[1.0]).expect("valid builtin")
    }

    /// `f(u) = u^3 - u`, `D = sigma = 1`.
    pub fn cubic() -> Self {
        FluxModel::polynomial(&[0.0, -1.0, 0.0, 1.0], &[1.0], &[1.0]).expect("valid builtin")
    }

    pub fn polynomial(flux: &[f64], diffusion: &[f64], mobility: &[f64]) -> Result<Self> {
        FluxModel::new(
            Curve::poly(Polynomial::new(flux.to_vec())),
            Curve::poly(Polynomial::new(diffusion.to_vec())),
            Curve::poly(Polynomial::new(mobility.to_vec())),
        )
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("quad_tol must be positive"));
        }
        self.quad_tol = tol;
        Ok(self)
    }

    pub fn with_working_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo >= -1.0 && hi <= 1.0) {
            return Err(Error::InvalidInput("working interval must lie in [-1, 1]"));
        }
        self.working = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for k in 0..VALIDATION_POINTS {
            let v = -1.0 + 2.0 * k as f64 / (VALIDATION_POINTS - 1) as f64;
            let d = self.diffusion.eval(v);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidInput("diffusion must be uniformly positive on [-1, 1]"));
            }
            let (lo, hi) = self.working;
            let w = lo + (hi - lo) * k as f64 / (VALIDATION_POINTS - 1) as f64;
            let s = self.mobility.eval(w);
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidInput("mobility must be positive on the working interval"));
            }
            if !self.flux.eval(v).is_finite() {
                return Err(Error::InvalidInput("flux must be finite on [-1, 1]"));
            }
        }
        Ok(())
    }

    /// Largest deviation of the supplied flux derivatives from the exact
    /// ones (polynomial flux) or from central differences (other fluxes)
    /// over 101 points of `[-1, 1]`.
    pub fn derivative_mismatch(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..VALIDATION_POINTS {
            let v = -1.0 + 2.0 * k as f64 / (VALIDATION_POINTS - 1) as f64;
            let (e1, e2) = match &self.flux {
                Curve::Poly { p, .. } => {
                    let dp = p.derivative();
                    (dp.eval(v), dp.derivative().eval(v))
                }
                other => {
                    let h = 1e-5;
                    let (fm, f0, fp) = (other.eval(v - h), other.eval(v), other.eval(v + h));
                    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
                }
            };
            worst = worst
                .max((self.flux.d1(v) - e1).abs())
                .max((self.flux.d2(v) - e2).abs());
        }
        worst
    }

    /// Same `D` and `sigma` with flux `-f`. Spatial reflection maps
    /// solutions for `f` onto solutions for `-f` at equal cost.
    pub fn negated(&self) -> FluxModel {
        FluxModel {
            flux: self.flux.negated(),
            ..self.clone()
        }
    }

    /// Same `D` and `sigma` with the flux replaced by its piecewise-linear
    /// interpolant through `nodes` (sorted, strictly increasing).
    pub fn linearized(&self, nodes: &[f64]) -> Result<FluxModel> {
        let ys = nodes.iter().map(|&x| self.flux.eval(x)).collect();
        Ok(FluxModel {
            flux: Curve::Linear(PiecewiseLinear::new(nodes.to_vec(), ys)?),
            ..self.clone()
        })
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        self.flux.eval(u)
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        self.flux.d1(u)
    }

    #[inline]
    pub fn d2f(&self, u: f64) -> f64 {
        self.flux.d2(u)
    }

    /// `D(v) / sigma(v)`.
    pub fn weight(&self, v: f64) -> Result<f64> {
        let s = self.mobility.eval(v);
        if !(s > 0.0) {
            return Err(Error::DomainError("mobility is not positive"));
        }
        Ok(self.diffusion.eval(v) / s)
    }

    /// `D / sigma` as a polynomial, when `sigma` is constant and `D`
    /// polynomial.
    pub fn weight_polynomial(&self) -> Option<Polynomial> {
        let s = self.mobility.as_polynomial()?.as_constant()?;
        let d = self.diffusion.as_polynomial()?;
        Some(d.scale(1.0 / s))
    }

    /// Rankine–Hugoniot speed of a jump between `a` and `b`;
    /// `f'(a)` when the states agree.
    #[inline]
    pub fn rankine_hugoniot(&self, a: f64, b: f64) -> f64 {
        self.flux.secant(a, b)
    }

    /// `rho(v, u_plus, u_minus)`:
    /// `f(u-)(u+ - v) + f(u+)(v - u-) - f(v)(u+ - u-)` on the trace
    /// interval, zero outside.
    ///
    /// Evaluated in the factored form
    /// `(u+ - u-)(v - u-)(u+ - v) f[u-, v, u+]`, which is algebraically
    /// identical and keeps full relative accuracy for small jumps.
    pub fn rho(&self, v: f64, u_plus: f64, u_minus: f64) -> f64 {
        let (lo, hi) = if u_minus <= u_plus {
            (u_minus, u_plus)
        } else {
            (u_plus, u_minus)
        };
        if !(v >= lo && v <= hi) || lo == hi {
            return 0.0;
        }
        let jump = u_plus - u_minus;
        let inner = (v - u_minus) * (u_plus - v);
        jump * inner * self.flux.second_divided(u_minus, v, u_plus)
    }

    /// `rho` from the bracket expression, kept as an independent route
    /// for tests.
    pub fn rho_bracket(&self, v: f64, u_plus: f64, u_minus: f64) -> f64 {
        let (lo, hi) = if u_minus <= u_plus {
            (u_minus, u_plus)
        } else {
            (u_plus, u_minus)
        };
        if !(v >= lo && v <= hi) {
            return 0.0;
        }
        let f = |x| self.f(x);
        (f(u_minus) * (u_plus - v) + f(u_plus) * (v - u_minus)) - f(v) * (u_plus - u_minus)
    }

    fn kernel_breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        pts.push(lo);
        if let Curve::Linear(l) = &self.flux {
            pts.extend(l.kinks_between(lo, hi));
        }
        pts.push(hi);
        pts
    }

    /// Cost per unit time of a shock with left trace `u_minus` and right
    /// trace `u_plus`: `int (D/sigma) rho^+(v, u+, u-) dv / |u+ - u-|`.
    pub fn shock_cost_rate(&self, u_minus: f64, u_plus: f64) -> Result<f64> {
        self.weighted_rho_integral(u_minus, u_plus, |r| r.max(0.0))
    }

    /// `int (D/sigma) rho dv / |u+ - u-|` (signed).
    pub fn signed_rate_quadrature(&self, u_minus: f64, u_plus: f64) -> Result<f64> {
        self.weighted_rho_integral(u_minus, u_plus, |r| r)
    }

    fn weighted_rho_integral(
        &self,
        u_minus: f64,
        u_plus: f64,
        part: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        if u_minus == u_plus {
            return Ok(0.0);
        }
        let (lo, hi) = if u_minus < u_plus {
            (u_minus, u_plus)
        } else {
            (u_plus, u_minus)
        };
        let jump = (u_plus - u_minus).abs();
        let breaks = self.kernel_breaks(lo, hi);
        let mut failure = None;
        let value = quadrature::integrate_with_breaks(
            |v| match self.weight(v) {
                Ok(w) => w * part(self.rho(v, u_plus, u_minus)) / jump,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            &breaks,
            self.quad_tol,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }

    /// Signed entropy production rate of a shock for the pair `(h, g)`:
    /// `s (h(u-) - h(u+)) + g(u+) - g(u-)` with `s` the shock speed.
    pub fn h_production_rate(
        &self,
        entropy: &impl EntropyPair,
        u_minus: f64,
        u_plus: f64,
    ) -> Result<f64> {
        if u_minus == u_plus {
            return Ok(0.0);
        }
        let s = self.rankine_hugoniot(u_minus, u_plus);
        let dh = entropy.entropy(u_minus)? - entropy.entropy(u_plus)?;
        let dg = entropy.entropy_flux(u_plus)? - entropy.entropy_flux(u_minus)?;
        Ok(s * dh + dg)
    }

    /// The same rate by quadrature: `int h''(v) rho(v, u+, u-) dv / |u+ - u-|`.
    pub fn h_production_quadrature(
        &self,
        entropy: &impl EntropyPair,
        u_minus: f64,
        u_plus: f64,
    ) -> Result<f64> {
        if u_minus == u_plus {
            return Ok(0.0);
        }
        let (lo, hi) = if u_minus < u_plus {
            (u_minus, u_plus)
        } else {
            (u_plus, u_minus)
        };
        let jump = hi - lo;
        let mut failure = None;
        let value = quadrature::integrate_with_breaks(
            |v| match entropy.entropy_d2(v) {
                Ok(h2) => h2 * self.rho(v, u_plus, u_minus) / jump,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            &self.kernel_breaks(lo, hi),
            self.quad_tol,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }

    /// Production rate with the quadrature cross-check applied; fails with
    /// `QuadratureFailure` when the two routes disagree beyond `10 quad_tol`.
    pub fn h_production_rate_checked(
        &self,
        entropy: &impl EntropyPair,
        u_minus: f64,
        u_plus: f64,
    ) -> Result<f64> {
        let closed = self.h_production_rate(entropy, u_minus, u_plus)?;
        let quad = self.h_production_quadrature(entropy, u_minus, u_plus)?;
        let tol = 10.0 * self.quad_tol;
        if (closed - quad).abs() > tol {
            return Err(Error::QuadratureFailure {
                estimate: quad,
                error: (closed - quad).abs(),
                tol,
            });
        }
        Ok(closed)
    }

    pub fn einstein_entropy(&self, m: f64) -> Result<EinsteinEntropy> {
        EinsteinEntropy::new(self, m)
    }

    fn flux_integral(&self, a: f64, b: f64) -> Result<f64> {
        match &self.flux {
            Curve::Poly { p, .. } => Ok(p.integrate(a, b)),
            Curve::Linear(l) => {
                let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
                let mut pts = Vec::new();
                pts.push(lo);
                pts.extend(l.kinks_between(lo, hi));
                pts.push(hi);
                let s: f64 = pts
                    .windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (l.eval(w[0]) + l.eval(w[1])))
                    .sum();
                Ok(sign * s)
            }
            Curve::Custom(c) => quadrature::integrate(|v| (c.value)(v), a, b, self.quad_tol),
        }
    }

    /// `C(d1, d2) = ((d1 - d2) / 2) (f(m + d1) + f(m + d2)) - int_{m+d2}^{m+d1} f`,
    /// which equals `int rho(v, m + d1, m + d2) dv / |d1 - d2|`.
    pub fn c_kernel(&self, m: f64, d1: f64, d2: f64) -> Result<f64> {
        if d1 == d2 {
            return Ok(0.0);
        }
        let (a, b) = (m + d1, m + d2);
        let trap = 0.5 * (d1 - d2) * (self.f(a) + self.f(b));
        Ok(trap - self.flux_integral(b, a)?)
    }

    /// `C` by quadrature of `rho`.
    pub fn c_kernel_quadrature(&self, m: f64, d1: f64, d2: f64) -> Result<f64> {
        if d1 == d2 {
            return Ok(0.0);
        }
        let (u_plus, u_minus) = (m + d1, m + d2);
        let (lo, hi) = if u_minus < u_plus {
            (u_minus, u_plus)
        } else {
            (u_plus, u_minus)
        };
        let jump = hi - lo;
        quadrature::integrate_with_breaks(
            |v| self.rho(v, u_plus, u_minus) / jump,
            &self.kernel_breaks(lo, hi),
            self.quad_tol,
        )
    }

    /// Sign pattern of `rho(., u_plus, u_minus)` on the trace interval.
    pub fn classify(&self, u_minus: f64, u_plus: f64) -> FrontKind {
        const SAMPLES: usize = 65;
        if u_minus == u_plus {
            return FrontKind::Entropic;
        }
        // sign(rho) = sign(jump) * sign(f[u-, v, u+]) inside the interval.
        let jump_sign = if u_plus > u_minus { 1.0 } else { -1.0 };
        let mut dds = [0.0f64; SAMPLES];
        let mut scale: f64 = 0.0;
        for (k, dd) in dds.iter_mut().enumerate() {
            // Endpoints included: a sign change can sit arbitrarily close
            // to either trace.
            let t = k as f64 / (SAMPLES - 1) as f64;
            let v = u_minus + t * (u_plus - u_minus);
            *dd = jump_sign * self.flux.second_divided(u_minus, v, u_plus);
            scale = scale.max(dd.abs());
        }
        let tol = 1e-9 * scale + 1e-14;
        let any_pos = dds.iter().any(|&d| d > tol);
        let any_neg = dds.iter().any(|&d| d < -tol);
        match (any_pos, any_neg) {
            (false, _) => FrontKind::Entropic,
            (true, false) => FrontKind::AntiEntropic,
            (true, true) => FrontKind::Mixed,
        }
    }

    /// Largest window around `m` on which `f''` keeps a constant nonzero
    /// sign on each side, capped at `cap` and kept inside `(-1, 1)`.
    pub fn convexity_window(
        &self,
        m: f64,
        scan_resolution: usize,
        cap: f64,
    ) -> Result<ConvexityWindow> {
        if !(m > -1.0 && m < 1.0) {
            return Err(Error::InvalidInput("window center must lie in (-1, 1)"));
        }
        let n = scan_resolution.max(2);
        let reach = cap.min((1.0 - m.abs()) * (1.0 - 1e-9));
        let right = self.scan_side(m, reach, 1.0, n)?;
        let left = self.scan_side(m, reach, -1.0, n)?;
        let half_width = right.0.min(left.0);
        let (case, orientation) = match (left.1 > 0.0, right.1 > 0.0) {
            (true, true) => (ConvexityCase::A, Orientation::Convex),
            (false, false) => (ConvexityCase::A, Orientation::Concave),
            (false, true) => (ConvexityCase::B, Orientation::ConcaveLeftConvexRight),
            (true, false) => (ConvexityCase::B, Orientation::ConvexLeftConcaveRight),
        };
        Ok(ConvexityWindow {
            center: m,
            half_width,
            case,
            orientation,
        })
    }

    /// Returns (extent, sign of f'') for one side of the window.
    fn scan_side(&self, m: f64, reach: f64, dir: f64, n: usize) -> Result<(f64, f64)> {
        let sign_at = |t: f64| {
            let s = self.d2f(m + dir * t);
            if s.abs() <= 1e-13 {
                0.0
            } else {
                s.signum()
            }
        };
        let step = reach / n as f64;
        let mut k0 = 1;
        while k0 <= n && sign_at(k0 as f64 * step) == 0.0 {
            if k0 >= 2 {
                return Err(Error::DegenerateFlux { at: m + dir * k0 as f64 * step });
            }
            k0 += 1;
        }
        if k0 > n {
            return Err(Error::DegenerateFlux { at: m });
        }
        let s0 = sign_at(k0 as f64 * step);
        if k0 == 2 {
            // f'' vanished at the first sample: keep the window strictly inside it.
            return Ok((0.5 * step, s0));
        }
        let mut prev = k0 as f64 * step;
        for k in k0 + 1..=n {
            let t = k as f64 * step;
            if sign_at(t) != s0 {
                let (mut lo, mut hi) = (prev, t);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if sign_at(mid) == s0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok((0.5 * (lo + hi), s0));
            }
            prev = t;
        }
        Ok((reach, s0))
    }
}

enum EntropyForm {
    /// `D / sigma` polynomial: `h` and `h'` in closed form.
    Closed { h: Polynomial, dh: Polynomial },
    Quadrature,
}

enum FluxForm {
    Closed(Polynomial),
    Linear(PiecewiseLinear),
    Quadrature,
}

/// The Einstein entropy `h_m`: `sigma h_m'' = D`, `h_m(m) = h_m'(m) = 0`,
/// together with a conjugate flux `g_m(u) = int_m^u h_m' f'`.
pub struct EinsteinEntropy {
    model: FluxModel,
    m: f64,
    form: EntropyForm,
    flux_form: FluxForm,
}

impl fmt::Debug for EinsteinEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EinsteinEntropy").field("m", &self.m).finish()
    }
}

impl EinsteinEntropy {
    pub fn new(model: &FluxModel, m: f64) -> Result<Self> {
        if !(m > -1.0 && m < 1.0) {
            return Err(Error::InvalidInput("Einstein entropy needs m in (-1, 1)"));
        }
        model.weight(m)?;
        let form = match model.weight_polynomial() {
            Some(r) => {
                let r1 = r.antiderivative();
                let r2 = r1.antiderivative();
                // h(u) = R2(u) - R2(m) - R1(m) (u - m)
                let h = r2.add(&Polynomial::new(alloc::vec![
                    -r2.eval(m) + r1.eval(m) * m,
                    -r1.eval(m)
                ]));
                let dh = h.derivative();
                EntropyForm::Closed { h, dh }
            }
            None => EntropyForm::Quadrature,
        };
        let flux_form = match (&form, &model.flux) {
            (EntropyForm::Closed { dh, .. }, Curve::Poly { d1, .. }) => {
                let g = dh.mul(d1).antiderivative();
                let g0 = g.eval(m);
                FluxForm::Closed(g.add(&Polynomial::constant(-g0)))
            }
            (_, Curve::Linear(l)) => FluxForm::Linear(l.clone()),
            _ => FluxForm::Quadrature,
        };
        Ok(EinsteinEntropy {
            model: model.clone(),
            m,
            form,
            flux_form,
        })
    }

    pub fn center(&self) -> f64 {
        self.m
    }

    pub fn h(&self, u: f64) -> Result<f64> {
        match &self.form {
            EntropyForm::Closed { h, .. } => Ok(h.eval(u)),
            EntropyForm::Quadrature => {
                self.model.weight(u)?;
                let m = self.m;
                quadrature::integrate(
                    |w| (u - w) * self.model.weight(w).unwrap_or(f64::NAN),
                    m,
                    u,
                    self.model.quad_tol,
                )
            }
        }
    }

    pub fn dh(&self, u: f64) -> Result<f64> {
        match &self.form {
            EntropyForm::Closed { dh, .. } => Ok(dh.eval(u)),
            EntropyForm::Quadrature => {
                self.model.weight(u)?;
                quadrature::integrate(
                    |w| self.model.weight(w).unwrap_or(f64::NAN),
                    self.m,
                    u,
                    self.model.quad_tol,
                )
            }
        }
    }

    pub fn g(&self, u: f64) -> Result<f64> {
        match &self.flux_form {
            FluxForm::Closed(g) => Ok(g.eval(u)),
            FluxForm::Linear(l) => {
                let (lo, hi, sign) = if self.m <= u {
                    (self.m, u, 1.0)
                } else {
                    (u, self.m, -1.0)
                };
                let mut pts = Vec::new();
                pts.push(lo);
                pts.extend(l.kinks_between(lo, hi));
                pts.push(hi);
                let mut acc = 0.0;
                for w in pts.windows(2) {
                    let slope = l.d1(0.5 * (w[0] + w[1]));
                    acc += slope * (self.h(w[1])? - self.h(w[0])?);
                }
                Ok(sign * acc)
            }
            FluxForm::Quadrature => {
                let mut failure = None;
                let v = quadrature::integrate(
                    |w| match self.dh(w) {
                        Ok(d) => d * self.model.df(w),
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    },
                    self.m,
                    u,
                    self.model.quad_tol,
                )?;
                match failure {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
        }
    }
}

impl EntropyPair for EinsteinEntropy {
    fn entropy(&self, v: f64) -> Result<f64> {
        self.h(v)
    }

    fn entropy_flux(&self, v: f64) -> Result<f64> {
        self.g(v)
    }

    fn entropy_d2(&self, v: f64) -> Result<f64> {
        self.model.weight(v)
    }
}

/// A user-supplied entropy pair from closures.
pub struct ClosureEntropy<H, G, H2> {
    pub h: H,
    pub g: G,
    pub h2: H2,
}

impl<H, G, H2> EntropyPair for ClosureEntropy<H, G, H2>
where
    H: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    H2: Fn(f64) -> f64,
{
    fn entropy(&self, v: f64) -> Result<f64> {
        Ok((self.h)(v))
    }

    fn entropy_flux(&self, v: f64) -> Result<f64> {
        Ok((self.g)(v))
    }

    fn entropy_d2(&self, v: f64) -> Result<f64> {
        Ok((self.h2)(v))
    }
}
