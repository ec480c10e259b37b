//! Piecewise-constant densities on the unit torus.

use alloc::vec;
use alloc::vec::Vec;

use crate::flux::FluxModel;
use crate::math::wrap_unit;
use crate::{Error, Result};

/// Scale that snaps breakpoints onto multiples of `2^-53`. On that lattice
/// `1 - x` is exact for every `x` in `[0, 1)`, so reflection is an exact
/// involution.
const LATTICE: f64 = 9_007_199_254_740_992.0;

/// Breakpoints closer than this are treated as one.
pub const FUSE_TOL: f64 = 1e-14;

fn snap(x: f64) -> f64 {
    let y = libm::round(wrap_unit(x) * LATTICE) / LATTICE;
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// `values[k]` holds on `[breakpoints[k], breakpoints[k + 1])`; the last
/// piece wraps around to `breakpoints[0] + 1`.
///
/// Stored in normal form: breakpoints strictly increasing in `[0, 1)`,
/// cyclically adjacent values distinct. A constant profile is the single
/// piece starting at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidInput("profile needs matching, non-empty breakpoints and values"));
        }
        if breakpoints.iter().any(|b| !(*b >= 0.0 && *b < 1.0)) {
            return Err(Error::InvalidInput("breakpoints must lie in [0, 1)"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("breakpoints must increase strictly"));
        }
        if values.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::InvalidInput("profile values must lie in [-1, 1]"));
        }
        let pairs = breakpoints.into_iter().zip(values).collect();
        Ok(Self::from_sorted_pairs(pairs, FUSE_TOL))
    }

    pub fn constant(c: f64) -> Self {
        PiecewiseConstantProfile {
            breakpoints: vec![0.0],
            values: vec![c],
        }
    }

    /// Builds a profile from jump positions (any real numbers, read mod 1)
    /// and the value to the right of each jump. Jumps closer than `fuse`
    /// merge; the value right of the merged cluster wins.
    pub fn from_jumps(jumps: &[(f64, f64)], fuse: f64) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::InvalidInput("no jumps given"));
        }
        let mut pairs: Vec<(f64, f64)> = jumps.iter().map(|&(x, v)| (wrap_unit(x), v)).collect();
        // Stable sort keeps the given order among coincident jumps.
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::from_sorted_pairs(pairs, fuse))
    }

    fn from_sorted_pairs(pairs: Vec<(f64, f64)>, fuse: f64) -> Self {
        let mut fused: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (x, v) in pairs {
            match fused.last_mut() {
                Some(last) if x - last.0 <= fuse => last.1 = v,
                _ => fused.push((x, v)),
            }
        }
        if fused.len() > 1 {
            let first = fused[0];
            let last = *fused.last().unwrap();
            if first.0 + 1.0 - last.0 <= fuse {
                // The last cluster wraps onto the first one.
                fused.pop();
                fused[0].1 = first.1;
            }
        }
        let mut bps: Vec<f64> = Vec::with_capacity(fused.len());
        let mut vals: Vec<f64> = Vec::with_capacity(fused.len());
        for (x, v) in fused {
            let x = snap(x);
            if let Some(&prev) = bps.last() {
                if x <= prev {
                    *vals.last_mut().unwrap() = v;
                    continue;
                }
            }
            bps.push(x);
            vals.push(v);
        }
        let n = vals.len();
        let keep: Vec<bool> = (0..n).map(|k| vals[k] != vals[(k + n - 1) % n]).collect();
        if !keep.iter().any(|&k| k) {
            return Self::constant(vals[0]);
        }
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for k in 0..n {
            if keep[k] {
                breakpoints.push(bps[k]);
                values.push(vals[k]);
            }
        }
        PiecewiseConstantProfile { breakpoints, values }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    /// Length of piece `k`.
    pub fn piece_length(&self, k: usize) -> f64 {
        let n = self.breakpoints.len();
        if n == 1 {
            return 1.0;
        }
        if k + 1 < n {
            self.breakpoints[k + 1] - self.breakpoints[k]
        } else {
            self.breakpoints[0] + 1.0 - self.breakpoints[k]
        }
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(move |k| (self.breakpoints[k], self.piece_length(k), self.values[k]))
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let x = wrap_unit(x);
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 {
            *self.values.last().unwrap()
        } else {
            self.values[k - 1]
        }
    }

    pub fn mean(&self) -> f64 {
        self.pieces().map(|(_, len, v)| len * v).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `int h_m(u(x)) dx` with `h_m` the Einstein entropy around `m`.
    pub fn w_m(&self, model: &FluxModel, m: f64) -> Result<f64> {
        let h = model.einstein_entropy(m)?;
        let mut acc = 0.0;
        for (_, len, v) in self.pieces() {
            acc += len * h.h(v)?;
        }
        Ok(acc)
    }

    /// `x -> -x` on the torus.
    pub fn parity(&self) -> Self {
        let n = self.len();
        if n == 1 {
            return self.clone();
        }
        // Piece k occupies [b_k, b_{k+1}); its image starts at -b_{k+1}.
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let next = self.breakpoints[(k + 1) % n];
                (snap(-next), self.values[k])
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        PiecewiseConstantProfile {
            breakpoints: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Shift by `a`: the new profile is `x -> u(x - a)`.
    pub fn translated(&self, a: f64) -> Self {
        let pairs: Vec<(f64, f64)> = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| (b + a, v))
            .collect();
        if self.is_constant() {
            return self.clone();
        }
        Self::from_jumps(&pairs, 0.0).expect("non-empty")
    }

    /// Pointwise map of the values.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let pairs = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| (b, f(v)))
            .collect();
        Self::from_sorted_pairs(pairs, 0.0)
    }

    /// `(L1, sup)` distances.
    pub fn distances(&self, other: &Self) -> (f64, f64) {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        cuts.push(0.0);
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let mut l1 = 0.0;
        let mut sup: f64 = 0.0;
        for (k, &a) in cuts.iter().enumerate() {
            let b = if k + 1 < cuts.len() { cuts[k + 1] } else { 1.0 };
            if b <= a {
                continue;
            }
            let d = (self.value_at(a) - other.value_at(a)).abs();
            l1 += d * (b - a);
            sup = sup.max(d);
        }
        (l1, sup)
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.distances(other).0
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.distances(other).1
    }

    /// `sup |u - c|`.
    pub fn sup_distance_to(&self, c: f64) -> f64 {
        self.values.iter().map(|v| (v - c).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PiecewiseConstantProfile {
        PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![0.2, -0.2]).unwrap()
    }

    #[test]
    fn mean_of_square_wave() {
        assert_eq!(square().mean(), 0.0);
        let p = PiecewiseConstantProfile::new(vec![0.0, 0.25], vec![0.4, 0.0]).unwrap();
        assert!((p.mean() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn normalization_merges_equal_neighbours() {
        let p = PiecewiseConstantProfile::new(vec![0.1, 0.3, 0.6], vec![0.5, 0.5, -0.1]).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p.breakpoints()[0] - 0.1).abs() < 1e-16);
        assert_eq!(p.values(), &[0.5, -0.1]);
        let c = PiecewiseConstantProfile::new(vec![0.1, 0.3], vec![0.5, 0.5]).unwrap();
        assert!(c.is_constant());
        assert_eq!(c, PiecewiseConstantProfile::constant(0.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseConstantProfile::new(vec![0.5, 0.2], vec![0.0, 0.1]).is_err());
        assert!(PiecewiseConstantProfile::new(vec![0.0, 1.0], vec![0.0, 0.1]).is_err());
        assert!(PiecewiseConstantProfile::new(vec![0.0], vec![1.5]).is_err());
        assert!(PiecewiseConstantProfile::new(vec![], vec![]).is_err());
    }

    #[test]
    fn parity_of_square_wave() {
        let p = PiecewiseConstantProfile::new(vec![0.1, 0.3], vec![0.2, -0.2]).unwrap();
        let q = p.parity();
        // 0.2 on [0.1, 0.3) maps to (0.7, 0.9].
        assert!((q.value_at(0.8) - 0.2).abs() == 0.0);
        assert!((q.value_at(0.5) + 0.2).abs() == 0.0);
        assert_eq!(q.parity(), p);
    }

    #[test]
    fn w_m_vanishes_on_constant() {
        let model = FluxModel::cubic();
        let p = PiecewiseConstantProfile::constant(0.3);
        assert_eq!(p.w_m(&model, 0.3).unwrap(), 0.0);
        // D = sigma = 1: h_m(u) = (u - m)^2 / 2.
        let q = square();
        assert!((q.w_m(&model, 0.0).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn distances_between_profiles() {
        let p = square();
        let q = PiecewiseConstantProfile::constant(0.0);
        let (l1, sup) = p.distances(&q);
        assert!((l1 - 0.2).abs() < 1e-15);
        assert!((sup - 0.2).abs() < 1e-15);
    }

    #[test]
    fn jumps_fuse_and_wrap() {
        let p = PiecewiseConstantProfile::from_jumps(&[(1.25, 0.1), (0.75, -0.1)], 1e-12).unwrap();
        assert_eq!(p.breakpoints(), &[0.25, 0.75]);
        assert_eq!(p.values(), &[0.1, -0.1]);
        let q = PiecewiseConstantProfile::from_jumps(
            &[(0.25, 0.3), (0.25 + 1e-15, 0.1), (0.75, -0.1)],
            1e-12,
        )
        .unwrap();
        assert_eq!(q.values(), &[0.1, -0.1]);
    }
}
