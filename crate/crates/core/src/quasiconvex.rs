//! Bracketing search for the minimizer of a quasi-convex function on `[0, 1]`.
//!
//! The sample set starts at `{0, 0.5, 1}`. Each round keeps the lowest
//! samples (within a tie tolerance) plus one neighbor on each side, evaluates
//! the midpoints between adjacent kept samples and discards the rest. For a
//! quasi-convex function the minimizer always stays between the outermost
//! kept samples, so the bracket width bounds the location error.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

pub const DEFAULT_MAX_EVALS: usize = 10_000;

/// How close to the running minimum a sample must be to count as a minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TieTolerance {
    /// `factor * |min|`.
    Relative(f64),
    Absolute(f64),
}

impl Default for TieTolerance {
    fn default() -> Self {
        Self::Relative(4.0 * f64::EPSILON)
    }
}

impl TieTolerance {
    pub fn resolve(&self, min: f64) -> f64 {
        match *self {
            Self::Relative(r) => r * min.abs(),
            Self::Absolute(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiOptions {
    pub epsilon: f64,
    pub tie: TieTolerance,
    pub max_evals: usize,
    /// When set, stop as soon as the bracket holds at most one of these
    /// points and return the best of the nearby ones.
    pub snap_to: Option<Vec<f64>>,
}

impl QuasiOptions {
    pub fn new(epsilon: f64) -> Result<Self> {
        Ok(Self {
            epsilon: positive("epsilon", epsilon)?,
            tie: TieTolerance::default(),
            max_evals: DEFAULT_MAX_EVALS,
            snap_to: None,
        })
    }

    pub fn with_tie(mut self, tie: TieTolerance) -> Result<Self> {
        let v = match tie {
            TieTolerance::Relative(v) | TieTolerance::Absolute(v) => v,
        };
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "tie",
                value: v,
                reason: "must be finite and non-negative",
            });
        }
        self.tie = tie;
        Ok(self)
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals.max(3);
        self
    }

    pub fn snap_to_samples(mut self, samples: &[f64]) -> Self {
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        s.dedup();
        self.snap_to = Some(s);
        self
    }
}

/// Index span of the samples within the tie tolerance of the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizerSet {
    pub first: usize,
    pub last: usize,
    pub count: usize,
    /// False when a non-minimizer sits between two minimizers, which cannot
    /// happen for a quasi-convex function.
    pub contiguous: bool,
}

/// Locates the minimizers among `values` (ordered by position).
///
/// Panics if `values` is empty.
pub fn minimizer_set(values: &[f64], tie_tol: f64) -> MinimizerSet {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hits: Vec<usize> = (0..values.len()).filter(|&i| values[i] <= min + tie_tol).collect();
    let first = hits[0];
    let last = *hits.last().unwrap();
    MinimizerSet {
        first,
        last,
        count: hits.len(),
        contiguous: last - first + 1 == hits.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The bracket is no wider than epsilon.
    BracketWidth,
    /// Three or more tied minimizers are spaced within epsilon: a plateau.
    PlateauResolved,
    /// The bracket holds at most one snap point.
    SampleSnap,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiTraceRecord {
    pub iteration: usize,
    /// Bracket before this round's queries. The last record holds the
    /// final bracket and no queries.
    pub low: f64,
    pub high: f64,
    pub minimizers: usize,
    pub contiguous: bool,
    pub queried: Vec<f64>,
    pub evaluations: usize,
}

/// The retained samples, ordered by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub points: Vec<(f64, f64)>,
}

impl SearchState {
    fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Minimizers plus their immediate neighbors.
    fn retained(&self, set: &MinimizerSet) -> &[(f64, f64)] {
        let lo = set.first.saturating_sub(1);
        let hi = (set.last + 1).min(self.points.len() - 1);
        &self.points[lo..=hi]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiOptResult {
    pub best_x: f64,
    pub best_value: f64,
    pub low: f64,
    pub high: f64,
    pub evaluations: usize,
    /// True only when the bracket width reached epsilon.
    pub certified: bool,
    pub stop: StopReason,
    pub diagnostics: Vec<String>,
    pub state: SearchState,
    pub trace: Vec<QuasiTraceRecord>,
}

impl QuasiOptResult {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

struct Memo<F> {
    f: F,
    cache: HashMap<u64, f64>,
    evaluations: usize,
}

impl<F: FnMut(f64) -> f64> Memo<F> {
    fn eval(&mut self, x: f64) -> f64 {
        if let Some(&v) = self.cache.get(&x.to_bits()) {
            return v;
        }
        self.evaluations += 1;
        let v = (self.f)(x);
        self.cache.insert(x.to_bits(), v);
        v
    }
}

/// Minimizes a quasi-convex `objective` over `[0, 1]`.
pub fn minimize(objective: impl FnMut(f64) -> f64, options: &QuasiOptions) -> QuasiOptResult {
    let mut memo = Memo {
        f: objective,
        cache: HashMap::new(),
        evaluations: 0,
    };
    let mut state = SearchState {
        points: [0.0, 0.5, 1.0].into_iter().map(|x| (x, memo.eval(x))).collect(),
    };
    let mut trace = Vec::new();
    let mut diagnostics = Vec::new();
    let mut iteration = 0;

    let (stop, last_set) = loop {
        let values = state.values();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let set = minimizer_set(&values, options.tie.resolve(min));
        if !set.contiguous {
            let msg = format!(
                "iteration {iteration}: minimizers are not contiguous between {} and {}; \
                 objective may not be quasi-convex",
                state.points[set.first].0, state.points[set.last].0
            );
            log::warn!("{msg}");
            diagnostics.push(msg);
        }
        state.points = state.retained(&set).to_vec();
        let low = state.points[0].0;
        let high = state.points[state.points.len() - 1].0;

        if high - low <= options.epsilon {
            break (StopReason::BracketWidth, set);
        }
        let spacing = state.points.windows(2).map(|w| w[1].0 - w[0].0).fold(0.0, f64::max);
        if set.count >= 3 && spacing <= options.epsilon {
            break (StopReason::PlateauResolved, set);
        }
        if let Some(snap) = &options.snap_to {
            if snap.iter().filter(|&&s| low <= s && s <= high).count() <= 1 {
                break (StopReason::SampleSnap, set);
            }
        }
        let queries: Vec<f64> = state.points.windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)).collect();
        if memo.evaluations + queries.len() > options.max_evals {
            break (StopReason::Budget, set);
        }

        iteration += 1;
        let mut merged = Vec::with_capacity(state.points.len() + queries.len());
        for (i, &q) in queries.iter().enumerate() {
            merged.push(state.points[i]);
            merged.push((q, memo.eval(q)));
        }
        merged.push(state.points[state.points.len() - 1]);
        state.points = merged;
        trace.push(QuasiTraceRecord {
            iteration,
            low,
            high,
            minimizers: set.count,
            contiguous: set.contiguous,
            queried: queries,
            evaluations: memo.evaluations,
        });
    };

    let low = state.points[0].0;
    let high = state.points[state.points.len() - 1].0;
    // middle of any exact tie, so symmetric plateaus resolve to their center
    let min = state.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = (0..state.points.len()).filter(|&i| state.points[i].1 == min).collect();
    let (mut best_x, mut best_value) = state.points[ties[ties.len() / 2]];

    if stop == StopReason::SampleSnap {
        let snap = options.snap_to.as_deref().unwrap_or_default();
        let inside: Vec<f64> = snap.iter().copied().filter(|&s| low <= s && s <= high).collect();
        let candidates = if inside.is_empty() {
            let below = snap.iter().copied().rev().find(|&s| s < low);
            let above = snap.iter().copied().find(|&s| s > high);
            below.into_iter().chain(above).collect()
        } else {
            inside
        };
        if !candidates.is_empty() {
            (best_x, best_value) = (f64::NAN, f64::INFINITY);
            for c in candidates {
                let v = memo.eval(c);
                if v < best_value {
                    (best_x, best_value) = (c, v);
                }
            }
        }
    }

    trace.push(QuasiTraceRecord {
        iteration: iteration + 1,
        low,
        high,
        minimizers: last_set.count,
        contiguous: last_set.contiguous,
        queried: Vec::new(),
        evaluations: memo.evaluations,
    });

    QuasiOptResult {
        best_x,
        best_value,
        low,
        high,
        evaluations: memo.evaluations,
        certified: stop == StopReason::BracketWidth,
        stop,
        diagnostics,
        state,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(eps: f64) -> QuasiOptions {
        QuasiOptions::new(eps).unwrap()
    }

    #[test]
    fn minimizer_set_examples() {
        let s = minimizer_set(&[3.0, 1.0, 2.0], 0.0);
        assert_eq!((s.first, s.last, s.count), (1, 1, 1));
        let s = minimizer_set(&[2.0, 1.0, 1.0, 2.0], 0.0);
        assert_eq!((s.first, s.last, s.count, s.contiguous), (1, 2, 2, true));
        let s = minimizer_set(&[1.0, 2.0, 1.0], 0.0);
        assert_eq!((s.first, s.last, s.contiguous), (0, 2, false));
        let s = minimizer_set(&[1.0, 1.0 + 1e-9, 5.0], 1e-8);
        assert_eq!((s.first, s.last), (0, 1));
    }

    #[test]
    fn non_contiguous_minimizers_emit_diagnostic() {
        // three wells; the middle sample is higher than both ends
        let r = minimize(|x| if x == 0.5 { 1.0 } else { 0.0 }, &opts(1e-3).with_max_evals(50));
        assert!(!r.diagnostics.is_empty());
    }

    #[test]
    fn quadratic_off_grid() {
        let r = minimize(|x| (x - 0.3f64).powi(2), &opts(1e-8));
        assert!(r.certified);
        assert_eq!(r.stop, StopReason::BracketWidth);
        assert!(r.low <= 0.3 && 0.3 <= r.high);
        assert!(r.width() <= 1e-8);
        assert!((r.best_x - 0.3).abs() <= 1e-8);
    }

    #[test]
    fn boundary_minimum() {
        let r = minimize(|x| x, &opts(1e-6));
        assert!(r.certified);
        assert_eq!(r.low, 0.0);
        assert_eq!(r.best_x, 0.0);
        assert!(r.high <= 1e-6);
        assert!(r.evaluations as f64 <= 3.0 * (1e6f64).log2() + 10.0);
    }

    #[test]
    fn evaluation_count_is_logarithmic() {
        for c in [0.0, 0.1234, 0.5, 0.77, 1.0] {
            let r = minimize(|x| (x - c).abs(), &opts(1e-6));
            assert!(r.certified);
            assert!(r.evaluations as f64 <= 5.0 * (1e6f64).log2() + 10.0, "{c}: {}", r.evaluations);
            assert!(r.low <= c && c <= r.high);
        }
    }

    #[test]
    fn plateau_stops_on_spacing() {
        let f = |x: f64| if (0.25..=0.75).contains(&x) { 0.0 } else { (x - 0.5).abs() };
        let r = minimize(f, &opts(1e-2));
        assert_eq!(r.stop, StopReason::PlateauResolved);
        assert!(!r.certified);
        assert!(r.low <= 0.25 && r.high >= 0.75);
        assert_eq!(r.best_value, 0.0);
    }

    #[test]
    fn budget_stop() {
        let r = minimize(|x| (x - 0.3f64).powi(2), &opts(1e-12).with_max_evals(20));
        assert_eq!(r.stop, StopReason::Budget);
        assert!(!r.certified);
        assert!(r.evaluations <= 20);
    }

    #[test]
    fn snap_returns_a_sample() {
        let data = [0.0, 0.1, 0.32, 0.6, 0.9];
        let o = opts(1e-9).snap_to_samples(&data);
        let r = minimize(|x| (x - 0.3f64).powi(2), &o);
        assert_eq!(r.stop, StopReason::SampleSnap);
        assert_eq!(r.best_x, 0.32);
    }

    #[test]
    fn trace_brackets_are_nested() {
        let r = minimize(|x| (x - 0.61f64).abs(), &opts(1e-5));
        for w in r.trace.windows(2) {
            assert!(w[1].low >= w[0].low && w[1].high <= w[0].high);
        }
        let last = r.trace.last().unwrap();
        assert_eq!(last.evaluations, r.evaluations);
        assert!(last.queried.is_empty());
        assert_eq!((last.low, last.high), (r.low, r.high));
        assert!(last.high - last.low <= 1e-5);
    }

    #[test]
    fn tie_tolerance_validation() {
        assert!(opts(1e-3).with_tie(TieTolerance::Absolute(-1.0)).is_err());
        assert!(opts(1e-3).with_tie(TieTolerance::Relative(f64::NAN)).is_err());
        assert!(QuasiOptions::new(0.0).is_err());
        assert_eq!(TieTolerance::Relative(2.0).resolve(-3.0), 6.0);
    }
}
