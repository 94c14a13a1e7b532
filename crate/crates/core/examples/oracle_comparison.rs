//! Both optimizers against the brute-force grid oracle.

use pseudomode::estimator::{self, EstimatorConfig, OptimizerMode, DEFAULT_GRID};
use pseudomode::synth;
use pseudomode::SampleSet;

fn main() -> pseudomode::Result<()> {
    let mut rng = synth::rng(5);
    for _ in 0..5 {
        let samples = SampleSet::normalize(&synth::uniform(25, &mut rng))?;
        let oracle = estimator::grid_oracle(&samples, 2.633, 2.0, DEFAULT_GRID)?;
        let quasi = estimator::pseudo_mode(&samples, &EstimatorConfig::default())?;
        let lip = estimator::pseudo_mode(&samples, &EstimatorConfig::new(2.633, 2.0, OptimizerMode::Lipschitz, 1e-6)?)?;
        println!(
            "oracle {:.6}  quasi-convex {:.6} ({:>3} evals)  lipschitz {:.6} ({:>5} evals)",
            oracle.x_star, quasi.location_normalized, quasi.evaluations, lip.location_normalized, lip.evaluations
        );
    }
    Ok(())
}
