//! The cumulative smoothed Hamming objective over a normalized sample set
//! (with `m = 2`), its derivatives, the induced weights `p_x(n)` and the
//! quasi-convexity certificate.
//!
//! Per-sample terms are written through `t_n = e^{-k|x - x_n|}`, using
//! `alpha_n + 2 = (1 + t_n)^2 / t_n`:
//!
//! | quantity            | per-sample term                     |
//! |---------------------|-------------------------------------|
//! | `C(x)`              | `-t / (1+t)^2`                      |
//! | `C'(x)`             | `sgn(x - x_n) k t (1-t) / (1+t)^3`  |
//! | `C''(x)`            | `k^2 t (4t - 1 - t^2) / (1+t)^4`    |
//! | `(alpha_n + 2)^-2`  | `t^2 / (1+t)^4`                     |
//!
//! Sums run in ascending sample index with compensated accumulation, so the
//! results are reproducible bit for bit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::loss::SmoothedHammingLoss;
use crate::numeric::{CompensatedSum, Grid};

/// Samples mapped onto `[0, 1]`, with the affine map back to raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    offset: f64,
    scale: f64,
}

impl SampleSet {
    /// Min-max normalization: the smallest sample maps to 0 and the largest
    /// to 1. A constant input maps to all zeros with scale 0.
    pub fn normalize(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput("no samples".into()));
        }
        if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = hi - lo;
        if !scale.is_finite() {
            return Err(Error::Input(format!(
                "sample range {lo}..{hi} overflows double precision"
            )));
        }
        let values = if scale == 0.0 {
            vec![0.0; raw.len()]
        } else {
            raw.iter().map(|&v| ((v - lo) / scale).clamp(0.0, 1.0)).collect()
        };
        Ok(Self {
            values,
            offset: lo,
            scale,
        })
    }

    /// Samples that are already normalized (identity map to raw units).
    pub fn from_normalized(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("no samples".into()));
        }
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Input(format!(
                "sample {index} = {} lies outside [0, 1]",
                values[index]
            )));
        }
        Ok(Self {
            values,
            offset: 0.0,
            scale: 1.0,
        })
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

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale == 0.0
    }

    pub fn to_raw(&self, x: f64) -> f64 {
        self.offset + self.scale * x
    }

    pub fn to_normalized(&self, raw: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            (raw - self.offset) / self.scale
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// `(1/N) sum_n L(x - x_n)`; its Lipschitz constant does not grow with N.
    #[default]
    Average,
    /// `sum_n L(x - x_n)`.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    k: f64,
    aggregation: Aggregation,
}

impl ObjectiveConfig {
    pub fn new(k: f64, aggregation: Aggregation) -> Result<Self> {
        Ok(Self {
            k: positive("k", k)?,
            aggregation,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }
}

/// Normalized weights `p_x(n) = (alpha_n(x) + 2)^-2 / Z_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub probs: Vec<f64>,
    pub z: f64,
}

/// `1 + (e^k + e^{-k} - 2) / 4`, the largest value the certificate function
/// can take for data in `[0, 1]`. It stays below 4 iff `e^k + e^{-k} < 14`.
pub fn certificate_bound(k: f64) -> f64 {
    1.0 + 0.25 * (k.exp() + (-k).exp() - 2.0)
}

/// Outcome of a grid check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub first_violation: Option<f64>,
    /// Smallest checked quantity over the grid (`+inf` if nothing was checked).
    pub margin: f64,
}

/// Outcome of the first-difference sign scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodalityOutcome {
    pub passed: bool,
    pub sign_changes: usize,
    /// Grid point where the sequence first turns from rising to falling.
    pub first_violation: Option<f64>,
}

/// The `m = 2` objective over a sample set.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    config: ObjectiveConfig,
    samples: &'a [f64],
}

impl<'a> Objective<'a> {
    pub fn new(config: ObjectiveConfig, samples: &'a SampleSet) -> Self {
        Self {
            config,
            samples: samples.values(),
        }
    }

    pub fn config(&self) -> ObjectiveConfig {
        self.config
    }

    pub fn samples(&self) -> &'a [f64] {
        self.samples
    }

    pub fn k(&self) -> f64 {
        self.config.k
    }

    /// `N` for sums, 1 for averages.
    pub fn n_eff(&self) -> f64 {
        match self.config.aggregation {
            Aggregation::Sum => self.samples.len() as f64,
            Aggregation::Average => 1.0,
        }
    }

    fn factor(&self) -> f64 {
        match self.config.aggregation {
            Aggregation::Sum => 1.0,
            Aggregation::Average => 1.0 / self.samples.len() as f64,
        }
    }

    #[inline]
    fn decay(&self, x: f64, xn: f64) -> f64 {
        (-self.config.k * (x - xn).abs()).exp()
    }

    fn sum_terms(&self, x: f64, term: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for &xn in self.samples {
            acc.add(term(x - xn, self.decay(x, xn)));
        }
        acc.total()
    }

    /// `alpha_n(x) = e^{k(x - x_n)} + e^{-k(x - x_n)}`.
    pub fn alpha_n(&self, x: f64, n: usize) -> f64 {
        2.0 * (self.config.k * (x - self.samples[n])).cosh()
    }

    /// `alpha_n'(x) = k (e^{k(x - x_n)} - e^{-k(x - x_n)})`.
    pub fn alpha_n_d1(&self, x: f64, n: usize) -> f64 {
        2.0 * self.config.k * (self.config.k * (x - self.samples[n])).sinh()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.factor() * self.sum_terms(x, |_, t| -t / ((1.0 + t) * (1.0 + t)))
    }

    pub fn d1(&self, x: f64) -> f64 {
        let k = self.config.k;
        self.factor()
            * self.sum_terms(x, |d, t| {
                let s = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                s * k * t * (1.0 - t) / (1.0 + t).powi(3)
            })
    }

    pub fn d2(&self, x: f64) -> f64 {
        let k = self.config.k;
        self.factor()
            * k
            * k
            * self.sum_terms(x, |_, t| t * (4.0 * t - 1.0 - t * t) / (1.0 + t).powi(4))
    }

    pub fn weights(&self, x: f64) -> WeightDistribution {
        let raw: Vec<f64> = self
            .samples
            .iter()
            .map(|&xn| {
                let t = self.decay(x, xn);
                t * t / (1.0 + t).powi(4)
            })
            .collect();
        let z: f64 = raw.iter().copied().collect::<CompensatedSum>().total();
        WeightDistribution {
            probs: raw.iter().map(|w| w / z).collect(),
            z,
        }
    }

    /// `F(x) = E_p[e^{k(x - x_n)}] * E_p[e^{-k(x - x_n)}]` under `p = p_x`.
    ///
    /// Each weighted exponential `(alpha_n+2)^-2 e^{+-k(x-x_n)}` is one of
    /// `t/(1+t)^4` or `t^3/(1+t)^4`, so nothing overflows.
    pub fn certificate_f(&self, x: f64) -> f64 {
        let mut z = CompensatedSum::new();
        let mut up = CompensatedSum::new();
        let mut down = CompensatedSum::new();
        for &xn in self.samples {
            let t = self.decay(x, xn);
            let q = (1.0 + t).powi(4);
            let (near, far) = (t * t * t / q, t / q);
            z.add(t * t / q);
            if x >= xn {
                up.add(far);
                down.add(near);
            } else {
                up.add(near);
                down.add(far);
            }
        }
        let z = z.total();
        (up.total() / z) * (down.total() / z)
    }

    /// Largest certificate value over a grid, with its location.
    pub fn max_certificate(&self, grid: Grid) -> (f64, f64) {
        grid.points()
            .map(|x| (x, self.certificate_f(x)))
            .fold((grid.lo, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// `1e-3 * k * N_eff`.
    pub fn default_delta(&self) -> f64 {
        1e-3 * self.config.k * self.n_eff()
    }

    fn tol_zero(&self) -> f64 {
        1e-10 * self.config.k * self.config.k * self.n_eff()
    }

    /// Requires `C''(x) >= 0` wherever `|C'(x)| <= delta` on the grid, up to
    /// `1e-10 k^2 N_eff`. The margin is the smallest such `C''`.
    pub fn quasiconvexity_check(&self, delta: f64, grid: Grid) -> CheckOutcome {
        let tol = self.tol_zero();
        let mut margin = f64::INFINITY;
        let mut first_violation = None;
        for x in grid.points() {
            if self.d1(x).abs() > delta {
                continue;
            }
            let curv = self.d2(x);
            margin = margin.min(curv);
            if curv < -tol && first_violation.is_none() {
                first_violation = Some(x);
            }
        }
        CheckOutcome {
            passed: first_violation.is_none(),
            first_violation,
            margin,
        }
    }

    /// Requires `C'' + lambda C'^2 >= 0` on the grid, the sign of the second
    /// derivative of `exp(lambda C)`.
    pub fn exp_convexify_check(&self, lambda: f64, grid: Grid) -> CheckOutcome {
        let tol = self.tol_zero();
        let mut margin = f64::INFINITY;
        let mut first_violation = None;
        for x in grid.points() {
            let g = self.d1(x);
            let q = self.d2(x) + lambda * g * g;
            margin = margin.min(q);
            if q < -tol && first_violation.is_none() {
                first_violation = Some(x);
            }
        }
        CheckOutcome {
            passed: first_violation.is_none(),
            first_violation,
            margin,
        }
    }
}

/// Scans the first differences of `f` over the grid. Differences within
/// `1e-14` of zero are ties and carry no sign. Passes when the signs go from
/// falling to rising at most once.
pub fn unimodality_check(f: impl Fn(f64) -> f64, grid: Grid) -> UnimodalityOutcome {
    const TIE: f64 = 1e-14;
    let mut prev_x = grid.point(0);
    let mut prev = f(prev_x);
    let mut last_sign = 0i8;
    let mut rising = false;
    let mut sign_changes = 0;
    let mut first_violation = None;
    for i in 1..grid.size {
        let x = grid.point(i);
        let v = f(x);
        let diff = v - prev;
        let sign = if diff > TIE {
            1
        } else if diff < -TIE {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                sign_changes += 1;
            }
            if sign > 0 {
                rising = true;
            } else if rising && first_violation.is_none() {
                first_violation = Some(prev_x);
            }
            last_sign = sign;
        }
        prev = v;
        prev_x = x;
    }
    UnimodalityOutcome {
        passed: first_violation.is_none(),
        sign_changes,
        first_violation,
    }
}

/// Hessian of `F(x_1..x_N) = sum_{m,n} p_m p_n e^{k(x_n - x_m)}` in the sample
/// positions, holding the weights fixed.
///
/// Diagonal: `k^2 p_n sum_{i != n} p_i (e^{k(x_n-x_i)} + e^{k(x_i-x_n)})`.
/// Off-diagonal: `-k^2 p_n p_m (e^{k(x_n-x_m)} + e^{k(x_m-x_n)})`.
/// Every row sums to zero, so the matrix is weakly diagonally dominant with a
/// positive diagonal, hence positive semi-definite.
pub fn f_hessian(k: f64, positions: &[f64], weights: &[f64]) -> DMatrix<f64> {
    assert_eq!(positions.len(), weights.len(), "one weight per position");
    let n = positions.len();
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut diag = CompensatedSum::new();
        for b in 0..n {
            if a == b {
                continue;
            }
            let c = 2.0 * (k * (positions[a] - positions[b])).cosh();
            let off = -k * k * weights[a] * weights[b] * c;
            h[(a, b)] = off;
            diag.add(-off);
        }
        h[(a, a)] = diag.total();
    }
    h
}

/// Average of a general smoothed Hamming loss over samples; used where `m`
/// differs from 2.
#[derive(Debug, Clone, Copy)]
pub struct LossAverage<'a> {
    loss: SmoothedHammingLoss,
    samples: &'a [f64],
}

impl<'a> LossAverage<'a> {
    pub fn new(loss: SmoothedHammingLoss, samples: &'a SampleSet) -> Self {
        Self {
            loss,
            samples: samples.values(),
        }
    }

    pub fn loss(&self) -> SmoothedHammingLoss {
        self.loss
    }

    pub fn value(&self, x: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for &xn in self.samples {
            acc.add(self.loss.value(x - xn));
        }
        acc.total() / self.samples.len() as f64
    }
}
