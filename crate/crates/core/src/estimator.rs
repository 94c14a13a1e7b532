//! The pseudo-mode statistic end to end: normalize the data onto `[0, 1]`,
//! minimize the average smoothed Hamming objective there and map the result
//! back to raw units. Also provides the mean, median and exact mode
//! baselines and a brute-force grid oracle.
//!
//! Restricting the search to `[0, 1]` loses nothing. Every loss term
//! `L(x - x_n)` is nonincreasing for `x < x_n` and nondecreasing for
//! `x > x_n`, so the objective is nonincreasing left of the smallest sample
//! (0 after normalization) and nondecreasing right of the largest (1).

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::lipschitz::{self, LipschitzOptions, LipschitzTraceRecord};
use crate::loss::SmoothedHammingLoss;
use crate::numeric::{compensated_sum, Grid};
use crate::objective::{unimodality_check, Aggregation, LossAverage, Objective, ObjectiveConfig, SampleSet};
use crate::quasiconvex::{self, QuasiOptions, QuasiTraceRecord, StopReason};

pub const DEFAULT_K: f64 = SmoothedHammingLoss::QUASICONVEX_K;
pub const DEFAULT_M: f64 = 2.0;
pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 1_000_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mean,
    Median,
    ExactMode,
    PseudoModeLipschitz,
    PseudoModeQuasiConvex,
    GridOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMode {
    /// Quasi-convex search at the certified `k` with `m = 2`, Lipschitz
    /// search everywhere else.
    #[default]
    Auto,
    Lipschitz,
    QuasiConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub k: f64,
    pub m: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub location_raw: f64,
    pub location_normalized: f64,
    /// Average objective at the normalized location.
    pub objective_value: f64,
    pub evaluations: usize,
    pub certified: bool,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "optimizer", content = "records", rename_all = "snake_case")]
pub enum OptimizerTrace {
    None,
    Lipschitz(Vec<LipschitzTraceRecord>),
    QuasiConvex(Vec<QuasiTraceRecord>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub k: f64,
    pub m: f64,
    pub mode: OptimizerMode,
    pub epsilon: f64,
    /// Evaluation budget; `None` keeps the optimizer default.
    pub max_evals: Option<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            m: DEFAULT_M,
            mode: OptimizerMode::Auto,
            epsilon: DEFAULT_EPSILON,
            max_evals: None,
        }
    }
}

impl EstimatorConfig {
    pub fn new(k: f64, m: f64, mode: OptimizerMode, epsilon: f64) -> Result<Self> {
        SmoothedHammingLoss::new(k, m)?;
        positive("epsilon", epsilon)?;
        Ok(Self {
            k,
            m,
            mode,
            epsilon,
            max_evals: None,
        })
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = Some(max_evals);
        self
    }

    pub fn loss(&self) -> Result<SmoothedHammingLoss> {
        SmoothedHammingLoss::new(self.k, self.m)
    }

    pub fn parameters(&self) -> Parameters {
        Parameters {
            k: self.k,
            m: self.m,
            epsilon: self.epsilon,
        }
    }

    /// The optimizer `Auto` stands for under these parameters.
    pub fn resolved_mode(&self) -> OptimizerMode {
        match self.mode {
            OptimizerMode::Auto if self.m == 2.0 && self.k == DEFAULT_K => OptimizerMode::QuasiConvex,
            OptimizerMode::Auto => OptimizerMode::Lipschitz,
            mode => mode,
        }
    }
}

pub fn normalize(raw: &[f64]) -> Result<SampleSet> {
    SampleSet::normalize(raw)
}

/// Average smoothed Hamming objective at normalized `x`.
pub fn objective_value(samples: &SampleSet, k: f64, m: f64, x: f64) -> Result<f64> {
    if m == 2.0 {
        let config = ObjectiveConfig::new(k, Aggregation::Average)?;
        Ok(Objective::new(config, samples).value(x))
    } else {
        Ok(LossAverage::new(SmoothedHammingLoss::new(k, m)?, samples).value(x))
    }
}

pub fn pseudo_mode(samples: &SampleSet, config: &EstimatorConfig) -> Result<EstimateReport> {
    pseudo_mode_traced(samples, config).map(|(report, _)| report)
}

/// Like [`pseudo_mode`], also returning the optimizer's trace.
pub fn pseudo_mode_traced(
    samples: &SampleSet,
    config: &EstimatorConfig,
) -> Result<(EstimateReport, OptimizerTrace)> {
    let loss = config.loss()?;
    positive("epsilon", config.epsilon)?;
    let mode = config.resolved_mode();
    let method = match mode {
        OptimizerMode::QuasiConvex => Method::PseudoModeQuasiConvex,
        _ => Method::PseudoModeLipschitz,
    };
    let mut diagnostics = Vec::new();
    if mode == OptimizerMode::QuasiConvex {
        if config.m != 2.0 {
            return Err(Error::InvalidParameter {
                name: "m",
                value: config.m,
                reason: "quasi-convex search requires m = 2",
            });
        }
        if config.k != DEFAULT_K {
            let msg = format!(
                "quasi-convexity is only certified at k = {DEFAULT_K}; k = {} may give a non-quasi-convex objective",
                config.k
            );
            log::warn!("{msg}");
            diagnostics.push(msg);
        }
    }

    if samples.is_degenerate() {
        let report = EstimateReport {
            method,
            location_raw: samples.offset(),
            location_normalized: 0.0,
            objective_value: objective_value(samples, config.k, config.m, 0.0)?,
            evaluations: 0,
            certified: true,
            parameters: config.parameters(),
            diagnostics,
        };
        return Ok((report, OptimizerTrace::None));
    }

    let f: Box<dyn Fn(f64) -> f64 + '_> = if config.m == 2.0 {
        let objective = Objective::new(ObjectiveConfig::new(config.k, Aggregation::Average)?, samples);
        Box::new(move |x| objective.value(x))
    } else {
        let average = LossAverage::new(loss, samples);
        Box::new(move |x| average.value(x))
    };

    let (x, value, evaluations, certified, trace) = match mode {
        OptimizerMode::QuasiConvex => {
            let mut options = QuasiOptions::new(config.epsilon)?;
            if let Some(budget) = config.max_evals {
                options = options.with_max_evals(budget);
            }
            let r = quasiconvex::minimize(&f, &options);
            diagnostics.extend(r.diagnostics);
            match r.stop {
                StopReason::PlateauResolved => diagnostics.push(format!(
                    "objective is flat to within rounding on [{}, {}]; bracket is wider than epsilon",
                    r.low, r.high
                )),
                StopReason::Budget => diagnostics.push(budget_note(r.evaluations)),
                _ => {}
            }
            (r.best_x, r.best_value, r.evaluations, r.certified, OptimizerTrace::QuasiConvex(r.trace))
        }
        _ => {
            if config.mode == OptimizerMode::Auto && config.m == 2.0 {
                let check = unimodality_check(&f, Grid::unit(10_001));
                if !check.passed {
                    diagnostics.push(format!(
                        "objective is not unimodal on a 10001-point grid ({} slope sign changes, first near {})",
                        check.sign_changes,
                        check.first_violation.unwrap_or(f64::NAN)
                    ));
                }
            }
            let mut options = LipschitzOptions::new(loss.lipschitz_bound(), config.epsilon)?;
            if let Some(budget) = config.max_evals {
                options = options.with_max_evals(budget);
            }
            let r = lipschitz::minimize(&f, options);
            if !r.certified {
                diagnostics.push(budget_note(r.evaluations));
            }
            (r.best_x, r.best_value, r.evaluations, r.certified, OptimizerTrace::Lipschitz(r.trace))
        }
    };

    let report = EstimateReport {
        method,
        location_raw: samples.to_raw(x),
        location_normalized: x,
        objective_value: value,
        evaluations,
        certified,
        parameters: config.parameters(),
        diagnostics,
    };
    Ok((report, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedianRule {
    /// The lower of the two central order statistics for even counts.
    #[default]
    Lower,
    /// The average of the two central order statistics for even counts.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
}

pub fn mean(raw: &[f64]) -> Result<f64> {
    nonempty(raw)?;
    Ok(compensated_sum(raw.iter().copied()) / raw.len() as f64)
}

pub fn median(raw: &[f64], rule: MedianRule) -> Result<f64> {
    nonempty(raw)?;
    let mut sorted = raw.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let lower = sorted[(n - 1) / 2];
    Ok(match rule {
        MedianRule::Midpoint if n.is_multiple_of(2) => 0.5 * (lower + sorted[n / 2]),
        _ => lower,
    })
}

/// Most frequent value under exact equality; ties go to the smallest value.
pub fn exact_mode(raw: &[f64]) -> Result<f64> {
    nonempty(raw)?;
    let mut sorted = raw.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut best, mut best_count) = (sorted[0], 0);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().position(|&v| v != sorted[i]).map_or(sorted.len(), |p| i + p);
        if j - i > best_count {
            (best, best_count) = (sorted[i], j - i);
        }
        i = j;
    }
    Ok(best)
}

pub fn baselines(raw: &[f64]) -> Result<Baselines> {
    Ok(Baselines {
        mean: mean(raw)?,
        median: median(raw, MedianRule::Lower)?,
        mode: exact_mode(raw)?,
    })
}

/// Report for a baseline statistic, scored on the same objective as the
/// pseudo-mode.
pub fn baseline_report(raw: &[f64], method: Method, config: &EstimatorConfig) -> Result<EstimateReport> {
    let location_raw = match method {
        Method::Mean => mean(raw)?,
        Method::Median => median(raw, MedianRule::Lower)?,
        Method::ExactMode => exact_mode(raw)?,
        other => {
            return Err(Error::Input(format!("{other:?} is not a baseline statistic")));
        }
    };
    let samples = SampleSet::normalize(raw)?;
    let x = samples.to_normalized(location_raw);
    Ok(EstimateReport {
        method,
        location_raw,
        location_normalized: x,
        objective_value: objective_value(&samples, config.k, config.m, x)?,
        evaluations: 0,
        certified: true,
        parameters: config.parameters(),
        diagnostics: Vec::new(),
    })
}

fn budget_note(evaluations: usize) -> String {
    format!("evaluation budget exhausted after {evaluations} evaluations")
}

fn nonempty(raw: &[f64]) -> Result<()> {
    if raw.is_empty() {
        Err(Error::EmptyInput("no samples".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub x_star: f64,
    pub value: f64,
    pub step: f64,
}

/// Exhaustive minimization of the average objective on a uniform grid over
/// `[0, 1]`; ties go to the smallest `x`.
///
/// Evaluated independently of [`Objective`]: each term is `-t / (1 + t^2 + m t)`
/// with `t = e^{-k|x - x_n|}` formed from per-point exponentials.
pub fn grid_oracle(samples: &SampleSet, k: f64, m: f64, grid_size: usize) -> Result<OracleResult> {
    SmoothedHammingLoss::new(k, m)?;
    if grid_size < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_size",
            value: grid_size as f64,
            reason: "must be at least 2",
        });
    }
    let grid = Grid::unit(grid_size);
    let xs = samples.values();
    let n = xs.len() as f64;
    let term = |t: f64| -t / (1.0 + t * (t + m));

    let mut best = (f64::NAN, f64::INFINITY);
    let mut consider = |x: f64, v: f64| {
        if v < best.1 {
            best = (x, v);
        }
    };
    if k <= 300.0 {
        // e^{-k|x - x_n|} as a product of precomputed factors, exact up to rounding
        let up: Vec<f64> = xs.iter().map(|&xn| (k * xn).exp()).collect();
        let down: Vec<f64> = xs.iter().map(|&xn| (-k * xn).exp()).collect();
        for i in 0..grid_size {
            let x = grid.point(i);
            let (ex, emx) = ((k * x).exp(), (-k * x).exp());
            let mut sum = 0.0;
            for j in 0..xs.len() {
                let t = if x >= xs[j] { emx * up[j] } else { ex * down[j] };
                sum += term(t);
            }
            consider(x, sum / n);
        }
    } else {
        for i in 0..grid_size {
            let x = grid.point(i);
            let sum: f64 = xs.iter().map(|&xn| term((-k * (x - xn).abs()).exp())).sum();
            consider(x, sum / n);
        }
    }
    Ok(OracleResult {
        x_star: best.0,
        value: best.1,
        step: grid.step(),
    })
}

/// Oracle result as a report. It is certified when the grid is fine enough
/// that `L h / 2 <= epsilon`.
pub fn oracle_report(samples: &SampleSet, config: &EstimatorConfig, grid_size: usize) -> Result<EstimateReport> {
    let loss = config.loss()?;
    if samples.is_degenerate() {
        return Ok(EstimateReport {
            method: Method::GridOracle,
            location_raw: samples.offset(),
            location_normalized: 0.0,
            objective_value: objective_value(samples, config.k, config.m, 0.0)?,
            evaluations: 0,
            certified: true,
            parameters: config.parameters(),
            diagnostics: Vec::new(),
        });
    }
    let r = grid_oracle(samples, config.k, config.m, grid_size)?;
    Ok(EstimateReport {
        method: Method::GridOracle,
        location_raw: samples.to_raw(r.x_star),
        location_normalized: r.x_star,
        objective_value: r.value,
        evaluations: grid_size,
        certified: loss.lipschitz_bound() * r.step / 2.0 <= config.epsilon,
        parameters: config.parameters(),
        diagnostics: Vec::new(),
    })
}
