//! Small numeric helpers shared across modules: compensated summation and
//! uniform grids.

/// Neumaier compensated accumulator.
///
/// Terms are added in call order, so summing a slice front to back gives a
/// result that depends only on the slice contents.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.carry += (self.sum - t) + term;
        } else {
            self.carry += (term - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().total()
}

/// Closed uniform grid of `size` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub size: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, size: usize) -> Self {
        assert!(size >= 2, "a grid needs at least two points");
        assert!(lo < hi, "grid bounds must satisfy lo < hi");
        Self { lo, hi, size }
    }

    /// The grid over the normalized domain `[0, 1]`.
    pub fn unit(size: usize) -> Self {
        Self::new(0.0, 1.0, size)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.size - 1) as f64
    }

    /// Point `i`; the last point is exactly `hi`.
    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.size {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64 / (self.size - 1) as f64)
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |i| self.point(i))
    }
}
