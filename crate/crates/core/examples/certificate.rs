//! Quasi-convexity diagnostics of the cumulative objective.

use pseudomode::numeric::Grid;
use pseudomode::objective::{
    certificate_bound, f_hessian, unimodality_check, Aggregation, Objective, ObjectiveConfig, SampleSet,
};

fn main() -> pseudomode::Result<()> {
    let samples = SampleSet::normalize(&[1.0, 1.4, 2.2, 2.3, 2.35, 5.0])?;
    let grid = Grid::unit(10_001);
    for k in [2.633, 10.0] {
        let obj = Objective::new(ObjectiveConfig::new(k, Aggregation::Average)?, &samples);
        let (x, f) = obj.max_certificate(grid);
        let qc = obj.quasiconvexity_check(obj.default_delta(), grid);
        let uni = unimodality_check(|x| obj.value(x), grid);
        println!(
            "k = {k}: max F = {f:.4} at {x:.3} (bound {:.4}), derivative test {}, slope sign changes {}",
            certificate_bound(k),
            if qc.passed { "passes" } else { "fails" },
            uni.sign_changes
        );
    }

    let pair = SampleSet::from_normalized(vec![0.0, 1.0])?;
    let obj = Objective::new(ObjectiveConfig::new(10.0, Aggregation::Average)?, &pair);
    let uni = unimodality_check(|x| obj.value(x), grid);
    println!("{{0, 1}} at k = 10: unimodal = {}, interior maximum near {:?}", uni.passed, uni.first_violation);

    let obj = Objective::new(ObjectiveConfig::new(2.633, Aggregation::Average)?, &samples);
    let w = obj.weights(0.4);
    let h = f_hessian(2.633, samples.values(), &w.probs);
    println!("F-Hessian at x = 0.4 (rows sum to zero):\n{h:.4}");
    Ok(())
}
