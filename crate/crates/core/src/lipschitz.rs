//! Global minimization of a Lipschitz-continuous function on `[0, 1]` by
//! bisection driven by midpoint lower bounds.
//!
//! Each candidate interval `[x0, x1]` with endpoint values `v0, v1` gets the
//! score `min(v0, v1) - L (x1 - x0) / 2`. Every point of the interval is
//! within half its width of an endpoint, so the score is a lower bound on the
//! function there. The interval with the lowest score is split at its
//! midpoint, and the two halves are scored and queued.
//!
//! The search stops once the best observed value is within `epsilon` of the
//! certified lower bound, i.e. the largest value seen so far of
//! `min(best, lowest outstanding score)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Result};

/// Intervals narrower than this are not queued; their midpoints no longer
/// separate in double precision.
pub const MIN_WIDTH: f64 = 1e-14;

pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzOptions {
    pub lipschitz: f64,
    pub epsilon: f64,
    pub max_evals: usize,
}

impl LipschitzOptions {
    pub fn new(lipschitz: f64, epsilon: f64) -> Result<Self> {
        Ok(Self {
            lipschitz: positive("lipschitz", lipschitz)?,
            epsilon: positive("epsilon", epsilon)?,
            max_evals: DEFAULT_MAX_EVALS,
        })
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals.max(2);
        self
    }
}

/// Midpoint query and lower-bound score of `[x0, x1]`.
pub fn score(x0: f64, x1: f64, v0: f64, v1: f64, lipschitz: f64) -> (f64, f64) {
    (0.5 * (x0 + x1), v0.min(v1) - lipschitz * (x1 - x0) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateInterval {
    pub x_left: f64,
    pub x_right: f64,
    pub value_left: f64,
    pub value_right: f64,
    pub score: f64,
}

impl CandidateInterval {
    pub fn new(x_left: f64, x_right: f64, value_left: f64, value_right: f64, lipschitz: f64) -> Self {
        let (_, score) = score(x_left, x_right, value_left, value_right, lipschitz);
        Self {
            x_left,
            x_right,
            value_left,
            value_right,
            score,
        }
    }

    pub fn query(&self) -> f64 {
        0.5 * (self.x_left + self.x_right)
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }
}

/// Min-heap order: lowest score first, ties to the leftmost interval.
struct Queued(CandidateInterval);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .score
            .total_cmp(&self.0.score)
            .then_with(|| other.0.x_left.total_cmp(&self.0.x_left))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// Initial evaluation of a domain boundary.
    Boundary,
    /// An interval was scored and queued; `x` is its midpoint.
    Insert,
    /// The lowest-scored interval was removed and its midpoint evaluated.
    Extract,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzTraceRecord {
    pub iteration: usize,
    pub kind: TraceKind,
    pub x: f64,
    pub value: Option<f64>,
    pub score: Option<f64>,
    /// Certified gap at the time of the record.
    pub gap: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalOptResult {
    pub best_x: f64,
    pub best_value: f64,
    pub evaluations: usize,
    /// `best_value - lower_bound`, never negative.
    pub certified_gap: f64,
    pub lower_bound: f64,
    /// True when the search stopped because the gap reached `epsilon`.
    pub certified: bool,
    pub trace: Vec<LipschitzTraceRecord>,
}

/// Minimizes `objective` over `[0, 1]`.
///
/// The returned value is within `epsilon` of the true minimum whenever
/// `certified` is set and `options.lipschitz` really bounds the slope.
pub fn minimize(mut objective: impl FnMut(f64) -> f64, options: LipschitzOptions) -> GlobalOptResult {
    let lip = options.lipschitz;
    let mut trace = Vec::new();
    let mut evaluations = 0;

    let mut eval = |x: f64, evaluations: &mut usize| {
        *evaluations += 1;
        objective(x)
    };

    let v0 = eval(0.0, &mut evaluations);
    let v1 = eval(1.0, &mut evaluations);
    let (mut best_x, mut best_value) = if v1 < v0 { (1.0, v1) } else { (0.0, v0) };
    let mut lower_bound = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    for (x, v) in [(0.0, v0), (1.0, v1)] {
        trace.push(LipschitzTraceRecord {
            iteration: 0,
            kind: TraceKind::Boundary,
            x,
            value: Some(v),
            score: None,
            gap,
            evaluations,
        });
    }

    let mut heap = BinaryHeap::new();
    let root = CandidateInterval::new(0.0, 1.0, v0, v1, lip);
    trace.push(LipschitzTraceRecord {
        iteration: 0,
        kind: TraceKind::Insert,
        x: root.query(),
        value: None,
        score: Some(root.score),
        gap,
        evaluations,
    });
    heap.push(Queued(root));
    // lowest score among intervals too narrow to queue
    let mut dropped_floor = f64::INFINITY;

    let mut iteration = 0;
    let certified = loop {
        let outstanding = heap.peek().map_or(f64::INFINITY, |q| q.0.score).min(dropped_floor);
        lower_bound = lower_bound.max(outstanding.min(best_value));
        gap = (best_value - lower_bound).max(0.0);
        if gap <= options.epsilon {
            break true;
        }
        if evaluations >= options.max_evals {
            break false;
        }
        let Some(Queued(interval)) = heap.pop() else {
            break true;
        };
        iteration += 1;
        let xm = interval.query();
        let vm = eval(xm, &mut evaluations);
        if vm < best_value {
            best_value = vm;
            best_x = xm;
        }
        trace.push(LipschitzTraceRecord {
            iteration,
            kind: TraceKind::Extract,
            x: xm,
            value: Some(vm),
            score: Some(interval.score),
            gap,
            evaluations,
        });
        let children = [
            CandidateInterval::new(interval.x_left, xm, interval.value_left, vm, lip),
            CandidateInterval::new(xm, interval.x_right, vm, interval.value_right, lip),
        ];
        for child in children {
            if child.width() < MIN_WIDTH {
                dropped_floor = dropped_floor.min(child.score);
                continue;
            }
            trace.push(LipschitzTraceRecord {
                iteration,
                kind: TraceKind::Insert,
                x: child.query(),
                value: None,
                score: Some(child.score),
                gap,
                evaluations,
            });
            heap.push(Queued(child));
        }
    };

    GlobalOptResult {
        best_x,
        best_value,
        evaluations,
        certified_gap: gap,
        lower_bound,
        certified,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_examples() {
        let (q, s) = score(0.0, 1.0, 0.0, 0.0, 2.0 / 9.0);
        assert_eq!(q, 0.5);
        assert!((s + 1.0 / 9.0).abs() < 1e-16);
        let (q, s) = score(0.25, 0.5, -0.2, -0.1, 1.0);
        assert_eq!(q, 0.375);
        assert!((s + 0.325).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_options() {
        assert!(LipschitzOptions::new(1.0, 0.0).is_err());
        assert!(LipschitzOptions::new(1.0, -1e-3).is_err());
        assert!(LipschitzOptions::new(0.0, 1e-3).is_err());
    }

    #[test]
    fn heap_extracts_lowest_score_then_leftmost() {
        let mut heap = BinaryHeap::new();
        for (xl, s) in [(0.5, -1.0), (0.0, -1.0), (0.25, -3.0), (0.75, 0.0)] {
            heap.push(Queued(CandidateInterval {
                x_left: xl,
                x_right: xl + 0.25,
                value_left: 0.0,
                value_right: 0.0,
                score: s,
            }));
        }
        let order: Vec<f64> = std::iter::from_fn(|| heap.pop().map(|q| q.0.x_left)).collect();
        assert_eq!(order, vec![0.25, 0.0, 0.5, 0.75]);
    }

    #[test]
    fn constant_objective() {
        let opts = LipschitzOptions::new(1.0, 1e-2).unwrap();
        let r = minimize(|_| 0.0, opts);
        assert!(r.certified);
        assert_eq!(r.best_value, 0.0);
        assert!(r.certified_gap <= 1e-2);
        assert!(r.evaluations <= 2 + 128);
    }

    #[test]
    fn absolute_value_kink() {
        let opts = LipschitzOptions::new(1.0, 1e-4).unwrap();
        let r = minimize(|x| (x - 0.5f64).abs(), opts);
        assert!(r.certified);
        assert!((r.best_x - 0.5).abs() <= 1e-4);
        assert!(r.best_value <= 1e-4);
    }

    #[test]
    fn off_grid_minimum() {
        let opts = LipschitzOptions::new(2.0, 1e-6).unwrap();
        let r = minimize(|x| (x - 0.3f64).abs() * 2.0, opts);
        assert!(r.certified);
        assert!(r.best_value <= 1e-6);
        assert!(r.lower_bound <= 0.0);
    }

    #[test]
    fn budget_exhaustion_is_uncertified() {
        let opts = LipschitzOptions::new(10.0, 1e-9).unwrap().with_max_evals(20);
        let r = minimize(|x| (20.0 * x).sin(), opts);
        assert!(!r.certified);
        assert_eq!(r.evaluations, 20);
        assert!(r.certified_gap > 1e-9);
    }

    #[test]
    fn trace_gap_is_nonincreasing_and_counts_match() {
        let opts = LipschitzOptions::new(5.0, 1e-5).unwrap();
        let r = minimize(|x| (7.0 * x).sin() * (1.0 - x), opts);
        let gaps: Vec<f64> = r.trace.iter().skip(2).map(|t| t.gap).collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.trace.last().unwrap().evaluations, r.evaluations);
        let extracts = r.trace.iter().filter(|t| t.kind == TraceKind::Extract).count();
        assert_eq!(extracts + 2, r.evaluations);
        for t in &r.trace {
            if let Some(v) = t.value {
                assert!(r.best_value <= v);
            }
        }
    }

    #[test]
    fn deterministic_traces() {
        let opts = LipschitzOptions::new(3.0, 1e-4).unwrap();
        let f = |x: f64| (9.0 * x).cos() + x;
        assert_eq!(minimize(f, opts), minimize(f, opts));
    }
}
