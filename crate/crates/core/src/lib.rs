//! Robust location estimation with the smoothed Hamming loss.
//!
//! The crate covers the loss family ([`loss`]), the cumulative objective and
//! its quasi-convexity certificate ([`objective`]), two derivative-free
//! minimizers ([`lipschitz`], [`quasiconvex`]) and the pseudo-mode estimator
//! built on them ([`estimator`]). The `pseudomode` binary exposes all of it
//! through [`cli`].

pub mod cli;
pub mod error;
pub mod estimator;
pub mod io;
pub mod lipschitz;
pub mod loss;
pub mod numeric;
pub mod objective;
pub mod quasiconvex;
pub mod synth;

pub use error::{Error, Result};
pub use estimator::{pseudo_mode, EstimateReport, EstimatorConfig, Method, OptimizerMode};
pub use loss::SmoothedHammingLoss;
pub use objective::SampleSet;
