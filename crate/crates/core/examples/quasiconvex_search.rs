//! Bracketing search on quasi-convex functions, including a plateau and the
//! sample-snapping mode.

use pseudomode::quasiconvex::{self, QuasiOptions};

fn main() -> pseudomode::Result<()> {
    let f = |x: f64| (x - 0.3f64).powi(2);
    let r = quasiconvex::minimize(f, &QuasiOptions::new(1e-8)?);
    println!(
        "(x - 0.3)^2: bracket [{:.10}, {:.10}], {} evaluations, {:?}",
        r.low, r.high, r.evaluations, r.stop
    );
    for t in r.trace.iter().take(5) {
        println!("  round {}: [{:.6}, {:.6}] queried {:?}", t.iteration, t.low, t.high, t.queried);
    }

    let plateau = |x: f64| ((x - 0.5f64).abs() - 0.1).max(0.0);
    let r = quasiconvex::minimize(plateau, &QuasiOptions::new(1e-3)?);
    println!("plateau of width 0.2: [{:.4}, {:.4}], {} evaluations, {:?}", r.low, r.high, r.evaluations, r.stop);

    let data = [0.05, 0.2, 0.33, 0.5, 0.81];
    let r = quasiconvex::minimize(f, &QuasiOptions::new(1e-9)?.snap_to_samples(&data));
    println!("snapped to data: x = {}, {} evaluations", r.best_x, r.evaluations);
    Ok(())
}
