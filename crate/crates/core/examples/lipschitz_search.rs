//! Certified global minimization of a multimodal Lipschitz function.

use pseudomode::lipschitz::{self, LipschitzOptions, TraceKind};

fn main() -> pseudomode::Result<()> {
    // slope bounded by 3 * 6 + 1
    let f = |x: f64| (6.0 * x).sin() * 3.0 + x;
    for eps in [1e-2, 1e-4, 1e-6] {
        let r = lipschitz::minimize(f, LipschitzOptions::new(19.0, eps)?);
        println!(
            "eps = {eps:e}: x* = {:.6}, f = {:.8}, gap = {:.2e}, evaluations = {}",
            r.best_x, r.best_value, r.certified_gap, r.evaluations
        );
    }

    let r = lipschitz::minimize(f, LipschitzOptions::new(19.0, 1e-3)?);
    println!("first extractions:");
    for t in r.trace.iter().filter(|t| t.kind == TraceKind::Extract).take(6) {
        println!("  x = {:.5}, score = {:>9.4}, gap = {:.4}", t.x, t.score.unwrap_or(f64::NAN), t.gap);
    }
    Ok(())
}
