//! Globally adaptive Gauss–Kronrod (7/15) quadrature with an absolute
//! error target.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Subdivision budget per integral.
pub const MAX_SUBINTERVALS: usize = 1 << 14;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Piece { a, b, value, error }
}

/// Integrate `f` over `[a, b]` to absolute accuracy `tol`.
///
/// Reversed limits give the negated integral.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrate over consecutive intervals `[p0, p1], [p1, p2], ...`.
///
/// Break points should sit on known kinks of the integrand; the error
/// budget is shared across all pieces.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: f64,
) -> Result<f64> {
    if points.len() < 2 {
        return Ok(0.0);
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        let reversed: Vec<f64> = points.iter().rev().copied().collect();
        return integrate_with_breaks(f, &reversed, tol).map(|v| -v);
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let p = kronrod15(&mut f, w[0], w[1]);
            total += p.value;
            total_err += p.error;
            heap.push(p);
        }
    }

    while total_err > tol.max(64.0 * f64::EPSILON * total.abs()) {
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error: total_err,
                tol,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureFailure {
                estimate: total,
                error: total_err,
                tol,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated update rounding.
    Ok(heap.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x - x, -0.3, 0.7, 1e-12).unwrap();
        let exact = (0.7f64.powi(4) - 0.3f64.powi(4)) / 4.0 - (0.49 - 0.09) / 2.0;
        assert!((v - exact).abs() < 1e-15);
    }

    #[test]
    fn kinked_integrand_converges() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_negate() {
        let a = integrate(libm::exp, 0.0, 1.0, 1e-12).unwrap();
        let b = integrate(libm::exp, 1.0, 0.0, 1e-12).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn budget_exhaustion_reports_failure() {
        // Rough at every scale.
        let noise = |x: f64| {
            let y = libm::sin(x * 1e7) * 43758.5453;
            y - libm::floor(y)
        };
        let r = integrate(noise, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

}
