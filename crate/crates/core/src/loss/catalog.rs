//! A small catalog of even, quasi-convex univariate losses: the three-branch
//! piecewise loss, pseudo-Huber, the generalized Huber (log-cosh family) and
//! the smoothed Hamming loss.

use serde::{Deserialize, Serialize};

use super::hamming::{Derivatives, SmoothedHammingLoss};
use crate::error::{positive, Error, Result};

/// A univariate loss with closed-form derivatives.
pub trait UnivariateLoss {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
    fn d3(&self, x: f64) -> f64;

    fn derivatives(&self, x: f64) -> Derivatives {
        Derivatives {
            d1: self.d1(x),
            d2: self.d2(x),
            d3: self.d3(x),
        }
    }
}

/// Quadratic inside `sigma1`, linear up to `sigma2`, constant 1 beyond.
///
/// Not differentiable at the two thresholds; the derivative methods return the
/// inner one-sided value there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLoss {
    sigma1: f64,
    sigma2: f64,
    alpha: f64,
}

impl PiecewiseLoss {
    pub fn new(sigma1: f64, sigma2: f64, alpha: f64) -> Result<Self> {
        positive("sigma1", sigma1)?;
        positive("alpha", alpha)?;
        if !(sigma2.is_finite() && sigma2 > sigma1) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                value: sigma2,
                reason: "must be finite and greater than sigma1",
            });
        }
        if alpha * sigma1 * sigma1 > 1.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "alpha * sigma1^2 must not exceed 1",
            });
        }
        Ok(Self {
            sigma1,
            sigma2,
            alpha,
        })
    }

    fn slope(&self) -> f64 {
        (1.0 - self.alpha * self.sigma1 * self.sigma1) / (self.sigma2 - self.sigma1)
    }

    fn intercept(&self) -> f64 {
        let s1 = self.sigma1;
        (self.alpha * s1 * s1 * self.sigma2 - s1) / (self.sigma2 - s1)
    }
}

impl UnivariateLoss for PiecewiseLoss {
    fn value(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= self.sigma1 {
            self.alpha * x * x
        } else if a <= self.sigma2 {
            self.slope() * a + self.intercept()
        } else {
            1.0
        }
    }

    fn d1(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= self.sigma1 {
            2.0 * self.alpha * x
        } else if a <= self.sigma2 {
            self.slope() * x.signum()
        } else {
            0.0
        }
    }

    fn d2(&self, x: f64) -> f64 {
        if x.abs() <= self.sigma1 {
            2.0 * self.alpha
        } else {
            0.0
        }
    }

    fn d3(&self, _x: f64) -> f64 {
        0.0
    }
}

/// `delta * sqrt(1 + x^2 / delta^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoHuberLoss {
    delta: f64,
}

impl PseudoHuberLoss {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            delta: positive("delta", delta)?,
        })
    }

    fn root(&self, x: f64) -> f64 {
        (x / self.delta).hypot(1.0)
    }
}

impl UnivariateLoss for PseudoHuberLoss {
    fn value(&self, x: f64) -> f64 {
        self.delta * self.root(x)
    }

    fn d1(&self, x: f64) -> f64 {
        x / (self.delta * self.root(x))
    }

    fn d2(&self, x: f64) -> f64 {
        1.0 / (self.delta * self.root(x).powi(3))
    }

    fn d3(&self, x: f64) -> f64 {
        -3.0 * x / (self.delta.powi(3) * self.root(x).powi(5))
    }
}

/// `(1/a) * log(e^{ax} + e^{-ax} + beta)`; log-cosh (up to a constant) at
/// `beta = 0`.
///
/// Evaluated through `t = e^{-a|x|}` as
/// `|x| + log1p(t^2 + beta*t) / a`, which never overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedHuberLoss {
    a: f64,
    beta: f64,
}

impl GeneralizedHuberLoss {
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        positive("a", a)?;
        if !(beta.is_finite() && beta > -2.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must be finite and greater than -2",
            });
        }
        Ok(Self { a, beta })
    }

    #[inline]
    fn parts(&self, x: f64) -> (f64, f64) {
        let t = (-self.a * x.abs()).exp();
        (t, 1.0 + t * t + self.beta * t)
    }
}

impl UnivariateLoss for GeneralizedHuberLoss {
    fn value(&self, x: f64) -> f64 {
        let (t, _) = self.parts(x);
        x.abs() + (t * t + self.beta * t).ln_1p() / self.a
    }

    fn d1(&self, x: f64) -> f64 {
        let (t, d) = self.parts(x);
        x.signum() * (1.0 - t * t) / d
    }

    fn d2(&self, x: f64) -> f64 {
        let (t, d) = self.parts(x);
        self.a * t * ((1.0 + t * t) * self.beta + 4.0 * t) / (d * d)
    }

    fn d3(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let (t, d) = self.parts(x);
        let b = self.beta;
        let num = b * b * t - b * (1.0 + t * t) - 8.0 * t;
        x.signum() * self.a * self.a * (1.0 - t * t) * t * num / (d * d * d)
    }
}

impl UnivariateLoss for SmoothedHammingLoss {
    fn value(&self, x: f64) -> f64 {
        SmoothedHammingLoss::value(self, x)
    }
    fn d1(&self, x: f64) -> f64 {
        SmoothedHammingLoss::d1(self, x)
    }
    fn d2(&self, x: f64) -> f64 {
        SmoothedHammingLoss::d2(self, x)
    }
    fn d3(&self, x: f64) -> f64 {
        SmoothedHammingLoss::d3(self, x)
    }
}

/// One loss from the catalog, with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossCatalogEntry {
    Piecewise(PiecewiseLoss),
    PseudoHuber(PseudoHuberLoss),
    GeneralizedHuber(GeneralizedHuberLoss),
    SmoothedHamming(SmoothedHammingLoss),
}

impl LossCatalogEntry {
    pub fn piecewise(sigma1: f64, sigma2: f64, alpha: f64) -> Result<Self> {
        PiecewiseLoss::new(sigma1, sigma2, alpha).map(Self::Piecewise)
    }

    pub fn pseudo_huber(delta: f64) -> Result<Self> {
        PseudoHuberLoss::new(delta).map(Self::PseudoHuber)
    }

    pub fn generalized_huber(a: f64, beta: f64) -> Result<Self> {
        GeneralizedHuberLoss::new(a, beta).map(Self::GeneralizedHuber)
    }

    pub fn smoothed_hamming(k: f64, m: f64) -> Result<Self> {
        SmoothedHammingLoss::new(k, m).map(Self::SmoothedHamming)
    }

    fn inner(&self) -> &dyn UnivariateLoss {
        match self {
            Self::Piecewise(l) => l,
            Self::PseudoHuber(l) => l,
            Self::GeneralizedHuber(l) => l,
            Self::SmoothedHamming(l) => l,
        }
    }
}

impl UnivariateLoss for LossCatalogEntry {
    fn value(&self, x: f64) -> f64 {
        self.inner().value(x)
    }
    fn d1(&self, x: f64) -> f64 {
        self.inner().d1(x)
    }
    fn d2(&self, x: f64) -> f64 {
        self.inner().d2(x)
    }
    fn d3(&self, x: f64) -> f64 {
        self.inner().d3(x)
    }
}
