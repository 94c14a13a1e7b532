//! Loss functions: the smoothed Hamming loss with its region analysis, a
//! catalog of classic robust losses, and the extended generalized Huber
//! construction they are all instances of.

mod catalog;
mod extended;
mod hamming;

pub use catalog::{
    GeneralizedHuberLoss, LossCatalogEntry, PiecewiseLoss, PseudoHuberLoss, UnivariateLoss,
};
pub use extended::{
    Combination, Compose, Exponential, ExtendedLossSpec, FnTriple, Identity, Logistic,
    NearZeroQuadratic, NegReciprocal, ScalarFunction, ScaledLog, Sqrt,
};
pub use hamming::{region_boundaries, Derivatives, Region, RegionBoundaries, SmoothedHammingLoss};
