//! The smoothed Hamming loss `-1 / (e^{kx} + e^{-kx} + m)` and its
//! convex / concave / tail operating regions.
//!
//! Every quantity is evaluated through `t = e^{-k|x|}`, which lies in `(0, 1]`
//! for finite arguments. Writing `alpha = e^{kx} + e^{-kx} = (1 + t^2) / t`
//! turns each closed form into a ratio of small polynomials in `t`, so nothing
//! overflows. Once `k|x|` exceeds roughly 745, `t` underflows to zero and the
//! loss saturates to `-0.0`, its limit from below.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// First three derivatives of a univariate loss at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Convex,
    Concave,
    Tail,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Convex => "convex",
            Region::Concave => "concave",
            Region::Tail => "tail",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Values of `alpha(x) = e^{kx} + e^{-kx}` at which the loss changes region.
///
/// `convex_end` is the root of `8 + m*alpha - alpha^2` (second derivative
/// vanishes) and `concave_end` the root of `alpha^2 - 4m*alpha + m^2 - 24`
/// (third derivative vanishes). Both are at least 2 for every `m > -2`;
/// `degenerate` records the case where that fails, which can only happen for
/// parameters outside the valid range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundaries {
    pub convex_end: f64,
    pub concave_end: f64,
    pub degenerate: bool,
}

pub fn region_boundaries(m: f64) -> RegionBoundaries {
    let convex_end = 0.5 * (m + (m * m + 32.0).sqrt());
    let concave_end = 2.0 * m + (3.0 * m * m + 24.0).sqrt();
    RegionBoundaries {
        convex_end,
        concave_end,
        degenerate: convex_end < 2.0 || concave_end < 2.0 || concave_end < convex_end,
    }
}

/// Smoothed Hamming loss with scale `k > 0` and smoothing `m > -2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothedHammingLoss {
    k: f64,
    m: f64,
    #[serde(skip)]
    boundaries: Option<RegionBoundaries>,
}

impl SmoothedHammingLoss {
    /// Scale at which the average loss over data in `[0, 1]` is guaranteed
    /// quasi-convex (for `m = 2`).
    pub const QUASICONVEX_K: f64 = 2.633;

    pub fn new(k: f64, m: f64) -> Result<Self> {
        positive("k", k)?;
        if !(m.is_finite() && m > -2.0) {
            return Err(Error::InvalidParameter {
                name: "m",
                value: m,
                reason: "must be finite and greater than -2",
            });
        }
        Ok(Self {
            k,
            m,
            boundaries: Some(region_boundaries(m)),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn boundaries(&self) -> RegionBoundaries {
        self.boundaries.unwrap_or_else(|| region_boundaries(self.m))
    }

    /// `e^{-k|x|}`.
    #[inline]
    fn decay(&self, x: f64) -> f64 {
        (-self.k * x.abs()).exp()
    }

    #[inline]
    fn denom(&self, t: f64) -> f64 {
        1.0 + t * t + self.m * t
    }

    /// `alpha(x) = e^{kx} + e^{-kx}`; infinite once `e^{k|x|}` overflows.
    pub fn alpha(&self, x: f64) -> f64 {
        2.0 * (self.k * x).cosh()
    }

    /// Loss value, in `[-1/(2+m), 0)`; `-0.0` after saturation.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let t = self.decay(x);
        -t / self.denom(t)
    }

    pub fn d1(&self, x: f64) -> f64 {
        let t = self.decay(x);
        let d = self.denom(t);
        sign(x) * self.k * (1.0 - t * t) * t / (d * d)
    }

    pub fn d2(&self, x: f64) -> f64 {
        let t = self.decay(x);
        let d = self.denom(t);
        let s = 1.0 + t * t;
        // t^2 * (8 + m*alpha - alpha^2), expanded in t
        let num = 8.0 * t * t + self.m * t * s - s * s;
        self.k * self.k * t * num / (d * d * d)
    }

    pub fn d3(&self, x: f64) -> f64 {
        let t = self.decay(x);
        let d = self.denom(t);
        let s = 1.0 + t * t;
        let m = self.m;
        // t^2 * (alpha^2 - 4m*alpha + m^2 - 24), expanded in t
        let num = s * s - 4.0 * m * t * s + (m * m - 24.0) * t * t;
        let d2sq = d * d;
        sign(x) * self.k.powi(3) * (1.0 - t * t) * t * num / (d2sq * d2sq)
    }

    pub fn derivatives(&self, x: f64) -> Derivatives {
        Derivatives {
            d1: self.d1(x),
            d2: self.d2(x),
            d3: self.d3(x),
        }
    }

    /// Operating region of `x`, decided from `alpha(x)` and the closed-form
    /// boundaries rather than from derivative signs. Intervals are half-open
    /// on the right, so a boundary point belongs to the outer region.
    pub fn region(&self, x: f64) -> Region {
        self.region_of_alpha(self.alpha(x))
    }

    pub fn region_of_alpha(&self, alpha: f64) -> Region {
        let b = self.boundaries();
        if alpha < b.convex_end {
            Region::Convex
        } else if alpha < b.concave_end {
            Region::Concave
        } else {
            Region::Tail
        }
    }

    /// Non-negative offsets `x` where `alpha(x)` reaches the two region
    /// boundaries.
    pub fn boundary_offsets(&self) -> (f64, f64) {
        let b = self.boundaries();
        (
            (0.5 * b.convex_end).acosh() / self.k,
            (0.5 * b.concave_end).acosh() / self.k,
        )
    }

    /// Largest `|d1|` over the real line, attained where the convex region
    /// ends: `k * sqrt(a^2 - 4) / (a + m)^2` with `a = convex_end`.
    pub fn max_slope(&self) -> f64 {
        let a = self.boundaries().convex_end;
        self.k * (a * a - 4.0).sqrt() / ((a + self.m) * (a + self.m))
    }

    /// Lipschitz constant used by the global optimizer.
    ///
    /// For `m = 2` this is the published `k/9`, slightly above the exact
    /// maximum slope `k*sqrt(3)/18`. Other `m` use [`Self::max_slope`].
    pub fn lipschitz_bound(&self) -> f64 {
        if self.m == 2.0 {
            self.k / 9.0
        } else {
            self.max_slope()
        }
    }
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sh(k: f64, m: f64) -> SmoothedHammingLoss {
        SmoothedHammingLoss::new(k, m).unwrap()
    }

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(SmoothedHammingLoss::new(0.0, 2.0).is_err());
        assert!(SmoothedHammingLoss::new(-1.0, 2.0).is_err());
        assert!(SmoothedHammingLoss::new(1.0, -2.0).is_err());
        assert!(SmoothedHammingLoss::new(1.0, f64::NAN).is_err());
        assert!(SmoothedHammingLoss::new(1.0, -1.99).is_ok());
    }

    #[test]
    fn value_at_origin_and_known_alphas() {
        for k in [0.1, 1.0, 2.633, 40.0] {
            assert_eq!(sh(k, 2.0).value(0.0), -0.25);
        }
        let l = sh(1.0, 2.0);
        assert_relative_eq!(l.value(2f64.acosh()), -1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(l.value(5f64.acosh()), -1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn saturates_to_negative_zero() {
        let l = sh(1.0, 2.0);
        let v = l.value(1e4);
        assert_eq!(v, 0.0);
        assert!(v.is_sign_negative());
        assert_eq!(l.d1(1e4), 0.0);
        assert!(l.value(700.0) < 0.0);
        assert_eq!(l.region(1e4), Region::Tail);
    }

    #[test]
    fn derivative_signs_and_roots() {
        let l = sh(1.0, 2.0);
        assert_eq!(l.d1(0.0), 0.0);
        assert!(l.d1(0.3) > 0.0 && l.d1(-0.3) < 0.0);
        // alpha = 4 is the root of 8 + 2a - a^2
        assert!(l.d2(2f64.acosh()).abs() < 1e-15);
        // alpha = 10 is the root of a^2 - 8a - 20
        assert!(l.d3(5f64.acosh()).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_high_precision_reference() {
        // reference values from arbitrary-precision numerical differentiation
        let l = sh(3.0, 2.0);
        assert_relative_eq!(l.d1(0.2), 0.199943204325545380, max_relative = 1e-13);
        assert_relative_eq!(l.d2(0.2), 0.767422184681882002, max_relative = 1e-13);
        assert_relative_eq!(l.d3(0.2), -3.14084740776782631, max_relative = 1e-13);
        let fd = central(|x| l.value(x), 0.2, 1e-5);
        assert!((l.d1(0.2) - fd).abs() <= 1e-6 * fd.abs());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (k, m) in [(1.0, 2.0), (3.0, 0.0), (0.5, -1.5), (7.0, 5.0)] {
            let l = sh(k, m);
            for i in 1..200 {
                let x = -10.0 / k + 20.0 / k * (i as f64 / 200.0);
                let h = 1e-5 / k;
                let checks = [
                    (l.d1(x), central(|y| l.value(y), x, h)),
                    (l.d2(x), central(|y| l.d1(y), x, h)),
                    (l.d3(x), central(|y| l.d2(y), x, h)),
                ];
                for (order, (analytic, fd)) in checks.into_iter().enumerate() {
                    // relative near zero crossings is meaningless; floor at the
                    // natural scale k^order
                    let scale = analytic.abs().max(1e-3 * k.powi(order as i32 + 1));
                    assert!(
                        (analytic - fd).abs() <= 1e-6 * scale,
                        "k={k} m={m} x={x} order={}: {analytic} vs {fd}",
                        order + 1
                    );
                }
            }
        }
    }

    #[test]
    fn boundaries_for_m2_and_m0() {
        let b = region_boundaries(2.0);
        assert_eq!((b.convex_end, b.concave_end), (4.0, 10.0));
        assert!(!b.degenerate);
        let b0 = region_boundaries(0.0);
        assert_relative_eq!(b0.convex_end, 2.828427124746190, max_relative = 1e-15);
        assert_relative_eq!(b0.concave_end, 4.898979485566356, max_relative = 1e-15);
        // sign check on either side of each m = 0 boundary
        let l = sh(1.0, 0.0);
        let (xc, xt) = l.boundary_offsets();
        assert!(l.d2(xc - 1e-6) > 0.0 && l.d2(xc + 1e-6) < 0.0);
        assert!(l.d3(xt - 1e-6) < 0.0 && l.d3(xt + 1e-6) > 0.0);
        for m in [-1.99, -1.0, 0.0, 2.0, 10.0, 100.0] {
            assert!(!region_boundaries(m).degenerate, "m={m}");
        }
    }

    #[test]
    fn region_classification_by_alpha() {
        let l = sh(1.0, 2.0);
        assert_eq!(l.region_of_alpha(2.0), Region::Convex);
        assert_eq!(l.region_of_alpha(3.0), Region::Convex);
        assert_eq!(l.region_of_alpha(4.0), Region::Concave);
        assert_eq!(l.region_of_alpha(7.0), Region::Concave);
        assert_eq!(l.region_of_alpha(10.0), Region::Tail);
        assert_eq!(l.region_of_alpha(12.0), Region::Tail);
        assert_eq!(l.region(0.0), Region::Convex);
        assert_eq!(l.region(-3.0), Region::Tail);
    }

    #[test]
    fn region_classification_agrees_with_derivative_signs() {
        for m in [-1.5, 0.0, 2.0, 6.0] {
            let l = sh(2.0, m);
            for i in 0..2000 {
                let x = -6.0 + 12.0 * i as f64 / 2000.0;
                let d = l.derivatives(x);
                // skip points within rounding distance of a boundary
                if d.d2.abs() < 1e-9 || d.d3.abs() < 1e-9 {
                    continue;
                }
                let expected = if d.d2 >= 0.0 {
                    Region::Convex
                } else if x * d.d3 <= 0.0 {
                    Region::Concave
                } else {
                    Region::Tail
                };
                assert_eq!(l.region(x), expected, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn boundary_values_partition_loss_uniformly_for_m2() {
        let l = sh(1.7, 2.0);
        let (xc, xt) = l.boundary_offsets();
        assert_relative_eq!(l.value(xc), -1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(l.value(xt), -1.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn lipschitz_bound_values() {
        assert_eq!(sh(9.0, 2.0).lipschitz_bound(), 1.0);
        assert_relative_eq!(sh(2.633, 2.0).lipschitz_bound(), 0.292_555_555_555_555_6, max_relative = 1e-15);
        assert_relative_eq!(sh(1.0, 2.0).max_slope(), 3f64.sqrt() / 18.0, max_relative = 1e-15);
        // m = 0: alpha* = 2*sqrt(2), slope = sqrt(4)/8 = 1/4
        assert_relative_eq!(sh(1.0, 0.0).lipschitz_bound(), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn dense_grid_slope_matches_max_slope() {
        let l = sh(1.0, 2.0);
        let n = 1_000_000;
        let max = (0..=n)
            .map(|i| l.d1(-10.0 + 20.0 * i as f64 / n as f64).abs())
            .fold(0.0, f64::max);
        assert_relative_eq!(max, 0.096_225_044_864_937_63, max_relative = 1e-8);
        assert!(max <= l.lipschitz_bound());
    }
}
