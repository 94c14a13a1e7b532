//! Seeded synthetic datasets: point-mass-plus-uniform mixtures and random
//! instances on `[0, 1]`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub n: usize,
    /// Location of the point mass.
    pub mass: f64,
    /// Share of samples placed exactly on the mass point.
    pub fraction: f64,
    /// Range of the uniform noise.
    pub low: f64,
    pub high: f64,
}

impl Default for Mixture {
    fn default() -> Self {
        Self {
            n: 200,
            mass: 0.5,
            fraction: 0.8,
            low: 0.0,
            high: 1.0,
        }
    }
}

impl Mixture {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyInput("mixture with zero samples".into()));
        }
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::InvalidParameter {
                name: "fraction",
                value: self.fraction,
                reason: "must lie in [0, 1]",
            });
        }
        if !(self.low.is_finite() && self.high.is_finite() && self.low < self.high && self.mass.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "high",
                value: self.high,
                reason: "noise range must be finite with low < high",
            });
        }
        Ok(())
    }

    /// `round(fraction * n)` copies of `mass`, the rest uniform noise, in
    /// shuffled order.
    pub fn sample(&self, rng: &mut impl Rng) -> Result<Vec<f64>> {
        self.validate()?;
        let copies = (self.fraction * self.n as f64).round() as usize;
        let mut data = vec![self.mass; copies];
        data.extend((copies..self.n).map(|_| rng.gen_range(self.low..self.high)));
        data.shuffle(rng);
        Ok(data)
    }
}

/// `n` uniform samples on `[0, 1]`.
pub fn uniform(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_counts_and_determinism() {
        let m = Mixture {
            n: 200,
            mass: 0.3,
            ..Mixture::default()
        };
        let a = m.sample(&mut rng(7)).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a.iter().filter(|&&v| v == 0.3).count(), 160);
        assert!(a.iter().all(|v| (0.0..1.0).contains(v)));
        assert_eq!(a, m.sample(&mut rng(7)).unwrap());
        assert_ne!(a, m.sample(&mut rng(8)).unwrap());
    }

    #[test]
    fn mixture_validation() {
        assert!(Mixture { n: 0, ..Mixture::default() }.validate().is_err());
        assert!(Mixture { fraction: 1.5, ..Mixture::default() }.validate().is_err());
        assert!(Mixture { low: 1.0, high: 0.0, ..Mixture::default() }.validate().is_err());
    }
}
