//! Extended generalized Huber losses built from an auxiliary function `f` and
//! a monotone transform `g`.
//!
//! * composite: `L(x) = g(f(x) + f(-x))`
//! * dissected: `L(x) = g(f(x)) + g(f(-x))`
//!
//! `f` is expected to be convex, finite everywhere and divergent at `+inf`;
//! `g` monotone increasing on the range it is evaluated over. Neither property
//! is enforced at construction. [`ExtendedLossSpec::check_contracts`] runs
//! randomized spot checks for callers that want them.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{positive, Error, Result};

/// A twice differentiable scalar function.
pub trait ScalarFunction: Send + Sync {
    fn value(&self, u: f64) -> f64;
    fn d1(&self, u: f64) -> f64;
    fn d2(&self, u: f64) -> f64;
}

/// `e^{a u} + b`.
#[derive(Debug, Clone, Copy)]
pub struct Exponential {
    pub a: f64,
    pub b: f64,
}

impl ScalarFunction for Exponential {
    fn value(&self, u: f64) -> f64 {
        (self.a * u).exp() + self.b
    }
    fn d1(&self, u: f64) -> f64 {
        self.a * (self.a * u).exp()
    }
    fn d2(&self, u: f64) -> f64 {
        self.a * self.a * (self.a * u).exp()
    }
}

/// `log(u - b) / a`, the inverse of [`Exponential`]; NaN for `u <= b`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledLog {
    pub a: f64,
    pub b: f64,
}

impl ScalarFunction for ScaledLog {
    fn value(&self, u: f64) -> f64 {
        if u > self.b {
            (u - self.b).ln() / self.a
        } else {
            f64::NAN
        }
    }
    fn d1(&self, u: f64) -> f64 {
        1.0 / (self.a * (u - self.b))
    }
    fn d2(&self, u: f64) -> f64 {
        let s = u - self.b;
        -1.0 / (self.a * s * s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sqrt;

impl ScalarFunction for Sqrt {
    fn value(&self, u: f64) -> f64 {
        u.sqrt()
    }
    fn d1(&self, u: f64) -> f64 {
        0.5 / u.sqrt()
    }
    fn d2(&self, u: f64) -> f64 {
        -0.25 / (u * u.sqrt())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl ScalarFunction for Identity {
    fn value(&self, u: f64) -> f64 {
        u
    }
    fn d1(&self, _u: f64) -> f64 {
        1.0
    }
    fn d2(&self, _u: f64) -> f64 {
        0.0
    }
}

/// `-1 / u`, increasing on `u > 0`.
#[derive(Debug, Clone, Copy)]
pub struct NegReciprocal;

impl ScalarFunction for NegReciprocal {
    fn value(&self, u: f64) -> f64 {
        -1.0 / u
    }
    fn d1(&self, u: f64) -> f64 {
        1.0 / (u * u)
    }
    fn d2(&self, u: f64) -> f64 {
        -2.0 / (u * u * u)
    }
}

/// Logistic sigmoid `d / (c + e^{-k u})` with `c, d, k > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Logistic {
    pub c: f64,
    pub d: f64,
    pub k: f64,
}

impl ScalarFunction for Logistic {
    fn value(&self, u: f64) -> f64 {
        self.d / (self.c + (-self.k * u).exp())
    }
    fn d1(&self, u: f64) -> f64 {
        let e = (-self.k * u).exp();
        let den = self.c + e;
        self.d * self.k * e / (den * den)
    }
    fn d2(&self, u: f64) -> f64 {
        let e = (-self.k * u).exp();
        let den = self.c + e;
        self.d * self.k * self.k * e * (e - self.c) / (den * den * den)
    }
}

/// `outer(inner(u))`.
#[derive(Clone)]
pub struct Compose {
    pub outer: Arc<dyn ScalarFunction>,
    pub inner: Arc<dyn ScalarFunction>,
}

impl ScalarFunction for Compose {
    fn value(&self, u: f64) -> f64 {
        self.outer.value(self.inner.value(u))
    }
    fn d1(&self, u: f64) -> f64 {
        self.outer.d1(self.inner.value(u)) * self.inner.d1(u)
    }
    fn d2(&self, u: f64) -> f64 {
        let v = self.inner.value(u);
        let dv = self.inner.d1(u);
        self.outer.d2(v) * dv * dv + self.outer.d1(v) * self.inner.d2(u)
    }
}

type Fun = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function given as three closures (value, first and second
/// derivative).
pub struct FnTriple {
    value: Fun,
    d1: Fun,
    d2: Fun,
}

impl FnTriple {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            d1: Box::new(d1),
            d2: Box::new(d2),
        }
    }
}

impl ScalarFunction for FnTriple {
    fn value(&self, u: f64) -> f64 {
        (self.value)(u)
    }
    fn d1(&self, u: f64) -> f64 {
        (self.d1)(u)
    }
    fn d2(&self, u: f64) -> f64 {
        (self.d2)(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    /// `g(f(x) + f(-x))`
    Composite,
    /// `g(f(x)) + g(f(-x))`
    Dissected,
}

/// Coefficients of the quadratic `a x^2 + b` the loss approaches near zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearZeroQuadratic {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone)]
pub struct ExtendedLossSpec {
    f: Arc<dyn ScalarFunction>,
    g: Arc<dyn ScalarFunction>,
    mode: Combination,
}

impl fmt::Debug for ExtendedLossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtendedLossSpec")
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl ExtendedLossSpec {
    pub fn new(
        f: Arc<dyn ScalarFunction>,
        g: Arc<dyn ScalarFunction>,
        mode: Combination,
    ) -> Self {
        Self { f, g, mode }
    }

    /// `f = e^{ax}`, `g = f^{-1}`: `log(e^{ax} + e^{-ax}) / a`, asymptote `|x|`.
    pub fn inverse_pair(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(Self::new(
            Arc::new(Exponential { a, b: 0.0 }),
            Arc::new(ScaledLog { a, b: 0.0 }),
            Combination::Composite,
        ))
    }

    /// `f = e^{ax}`, `g = h o f^{-1}`: asymptote `h(|x|)`.
    pub fn with_asymptote(a: f64, h: Arc<dyn ScalarFunction>) -> Result<Self> {
        positive("a", a)?;
        let g = Compose {
            outer: h,
            inner: Arc::new(ScaledLog { a, b: 0.0 }),
        };
        Ok(Self::new(
            Arc::new(Exponential { a, b: 0.0 }),
            Arc::new(g),
            Combination::Composite,
        ))
    }

    /// The smoothed Hamming loss `-1/(e^{kx} + e^{-kx} + m)` written as
    /// `f = e^{kx} + m/2`, `g(u) = -1/u`.
    pub fn smoothed_hamming(k: f64, m: f64) -> Result<Self> {
        crate::loss::SmoothedHammingLoss::new(k, m)?;
        Ok(Self::new(
            Arc::new(Exponential { a: k, b: 0.5 * m }),
            Arc::new(NegReciprocal),
            Combination::Composite,
        ))
    }

    /// Logistic construction `f = e^{kx} + b`, `g = h o f^{-1}` with
    /// `h(y) = d / (c + e^{-k y})`, giving `d / (c + 1/(e^{kx} + e^{-kx} + b))`.
    ///
    /// This is the affine image `d/c + (d/c^2) * L_H` of the smoothed Hamming
    /// loss with `m = b + 1/c`.
    pub fn logistic_hamming(k: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        positive("k", k)?;
        positive("c", c)?;
        positive("d", d)?;
        if !(b.is_finite() && b > -2.0) {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
                reason: "must be finite and greater than -2",
            });
        }
        let g = Compose {
            outer: Arc::new(Logistic { c, d, k }),
            inner: Arc::new(ScaledLog { a: k, b }),
        };
        Ok(Self::new(
            Arc::new(Exponential { a: k, b }),
            Arc::new(g),
            Combination::Composite,
        ))
    }

    pub fn mode(&self) -> Combination {
        self.mode
    }

    fn f_pair(&self, x: f64) -> Result<(f64, f64)> {
        let fx = self.f.value(x);
        if !fx.is_finite() {
            return Err(Error::Saturated {
                term: "f(x)",
                x,
                value: fx,
            });
        }
        let fmx = self.f.value(-x);
        if !fmx.is_finite() {
            return Err(Error::Saturated {
                term: "f(-x)",
                x,
                value: fmx,
            });
        }
        Ok((fx, fmx))
    }

    /// Loss value at `x`; fails when `f` overflows at `x` or `-x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (fx, fmx) = self.f_pair(x)?;
        match self.mode {
            Combination::Composite => {
                let u = fx + fmx;
                if !u.is_finite() {
                    return Err(Error::Saturated {
                        term: "f(x) + f(-x)",
                        x,
                        value: u,
                    });
                }
                Ok(self.g.value(u))
            }
            Combination::Dissected => Ok(self.g.value(fx) + self.g.value(fmx)),
        }
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        let (fx, fmx) = self.f_pair(x)?;
        let (df, dfm) = (self.f.d1(x), self.f.d1(-x));
        Ok(match self.mode {
            Combination::Composite => self.g.d1(fx + fmx) * (df - dfm),
            Combination::Dissected => self.g.d1(fx) * df - self.g.d1(fmx) * dfm,
        })
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        let (fx, fmx) = self.f_pair(x)?;
        let (df, dfm) = (self.f.d1(x), self.f.d1(-x));
        let (ddf, ddfm) = (self.f.d2(x), self.f.d2(-x));
        Ok(match self.mode {
            Combination::Composite => {
                let u = fx + fmx;
                let s = df - dfm;
                self.g.d2(u) * s * s + self.g.d1(u) * (ddf + ddfm)
            }
            Combination::Dissected => {
                self.g.d2(fx) * df * df
                    + self.g.d1(fx) * ddf
                    + self.g.d2(fmx) * dfm * dfm
                    + self.g.d1(fmx) * ddfm
            }
        })
    }

    /// Quadratic `a x^2 + b` matching the loss to second order at zero.
    ///
    /// Composite: `a = g'(2f(0)) f''(0)`, `b = g(2f(0))`.
    /// Dissected: `a = g''(f(0)) f'(0)^2 + g'(f(0)) f''(0)`, `b = 2 g(f(0))`.
    /// In both cases `2a` is the second derivative at zero. A non-positive `a`
    /// means the loss is not strictly convex at its minimum and is reported
    /// as [`Error::FlatAtOrigin`].
    pub fn near_zero_quadratic(&self) -> Result<NearZeroQuadratic> {
        let f0 = self.f.value(0.0);
        let q = match self.mode {
            Combination::Composite => NearZeroQuadratic {
                a: self.g.d1(2.0 * f0) * self.f.d2(0.0),
                b: self.g.value(2.0 * f0),
            },
            Combination::Dissected => {
                let df0 = self.f.d1(0.0);
                NearZeroQuadratic {
                    a: self.g.d2(f0) * df0 * df0 + self.g.d1(f0) * self.f.d2(0.0),
                    b: 2.0 * self.g.value(f0),
                }
            }
        };
        if q.a > 0.0 {
            Ok(q)
        } else {
            Err(Error::FlatAtOrigin { a: q.a, b: q.b })
        }
    }

    /// `2 g''(f(0)) f'(0)^2 + 2 g'(f(0)) f''(0)`, which must be positive for a
    /// dissected loss to be quadratic near zero.
    pub fn dissected_curvature_at_zero(&self) -> f64 {
        let f0 = self.f.value(0.0);
        let df0 = self.f.d1(0.0);
        2.0 * self.g.d2(f0) * df0 * df0 + 2.0 * self.g.d1(f0) * self.f.d2(0.0)
    }

    /// Sampled check of `g'(f(x)) f'(x) - g'(f(-x)) f'(-x) >= 0` on
    /// `samples` evenly spaced points of `[0, x_max]`. Returns the first
    /// offending `x`.
    pub fn dissected_monotonicity_violation(&self, x_max: f64, samples: usize) -> Option<f64> {
        (0..=samples)
            .map(|i| x_max * i as f64 / samples as f64)
            .find(|&x| {
                let fx = self.f.value(x);
                let fmx = self.f.value(-x);
                let slope = self.g.d1(fx) * self.f.d1(x) - self.g.d1(fmx) * self.f.d1(-x);
                slope < -1e-12 * slope.abs().max(1.0) || slope.is_nan()
            })
    }

    /// Randomized spot checks of the function contracts on `[lo, hi]`:
    /// `f` finite, 100 secant tests of convexity of `f`, and positivity and
    /// secant monotonicity of `g` over the arguments it receives.
    pub fn check_contracts(&self, lo: f64, hi: f64, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let a = rng.gen_range(lo..=hi);
            let b = rng.gen_range(lo..=hi);
            let w: f64 = rng.gen();
            let (fa, fb) = (self.f.value(a), self.f.value(b));
            if !fa.is_finite() {
                return Err(Error::ContractViolation { check: "f finite", x: a });
            }
            if !fb.is_finite() {
                return Err(Error::ContractViolation { check: "f finite", x: b });
            }
            let mid = w * a + (1.0 - w) * b;
            let chord = w * fa + (1.0 - w) * fb;
            if self.f.value(mid) > chord + 1e-12 * chord.abs().max(1.0) {
                return Err(Error::ContractViolation { check: "f convex", x: mid });
            }

            let (ua, ub) = match self.mode {
                Combination::Composite => (fa + self.f.value(-a), fb + self.f.value(-b)),
                Combination::Dissected => (fa, fb),
            };
            let (u_lo, u_hi) = if ua <= ub { (ua, ub) } else { (ub, ua) };
            if self.g.d1(u_lo).is_nan() || self.g.d1(u_lo) <= 0.0 {
                return Err(Error::ContractViolation { check: "g increasing", x: a });
            }
            if self.g.value(u_lo) > self.g.value(u_hi) {
                return Err(Error::ContractViolation { check: "g monotone", x: b });
            }
        }
        Ok(())
    }
}
