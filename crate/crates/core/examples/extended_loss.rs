//! Builds losses from an (f, g) pair and inspects their behavior near zero
//! and far out.

use std::sync::Arc;

use pseudomode::loss::{Combination, Exponential, ExtendedLossSpec, NegReciprocal, SmoothedHammingLoss, Sqrt};

fn main() -> pseudomode::Result<()> {
    let log_cosh = ExtendedLossSpec::inverse_pair(1.0)?;
    println!("log(e^x + e^-x): L(0) = {:.6}, L(50) - 50 = {:.2e}", log_cosh.eval(0.0)?, log_cosh.eval(50.0)? - 50.0);

    let sqrt_tail = ExtendedLossSpec::with_asymptote(4.0, Arc::new(Sqrt))?;
    println!("sqrt asymptote: L(100) = {:.6} (sqrt(100) = 10)", sqrt_tail.eval(100.0)?);

    let k = 2.0;
    let hamming = ExtendedLossSpec::smoothed_hamming(k, 2.0)?;
    let direct = SmoothedHammingLoss::new(k, 2.0)?;
    let q = hamming.near_zero_quadratic()?;
    println!("smoothed Hamming near 0: {:.6} x^2 + {:.6} (k^2/16 = {})", q.a, q.b, k * k / 16.0);
    for x in [0.0, 0.3, 1.0, 4.0] {
        println!("  x = {x:>4}: spec {:>12.8}, closed form {:>12.8}", hamming.eval(x)?, direct.value(x));
    }
    hamming.check_contracts(-3.0, 3.0, 1)?;

    let dissected = ExtendedLossSpec::new(
        Arc::new(Exponential { a: 1.0, b: 1.0 }),
        Arc::new(NegReciprocal),
        Combination::Dissected,
    );
    println!(
        "dissected -1/(e^x+1) - 1/(e^-x+1): curvature at 0 = {:.4}, monotonicity violation = {:?}",
        dissected.dissected_curvature_at_zero(),
        dissected.dissected_monotonicity_violation(5.0, 1000)
    );

    match ExtendedLossSpec::smoothed_hamming(1e3, 2.0)?.eval(1.0) {
        Ok(v) => println!("k = 1000 at x = 1: {v}"),
        Err(e) => println!("k = 1000 at x = 1: {e}"),
    }
    Ok(())
}
