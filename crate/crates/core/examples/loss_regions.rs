//! Region boundaries and slope bounds of the smoothed Hamming loss.

use pseudomode::loss::{region_boundaries, SmoothedHammingLoss};

fn main() -> pseudomode::Result<()> {
    for m in [0.0, 2.0, 6.0] {
        let b = region_boundaries(m);
        println!("m = {m}: convex while alpha < {:.4}, concave until {:.4}, tail after", b.convex_end, b.concave_end);
    }

    let k = 1.0;
    let loss = SmoothedHammingLoss::new(k, 2.0)?;
    let (convex, tail) = loss.boundary_offsets();
    println!("k = {k}, m = 2: convex on |x| < {convex:.4}, tail from |x| >= {tail:.4}");
    println!("max slope {:.6} (k sqrt(3)/18), certified bound {:.6} (k/9)", loss.max_slope(), loss.lipschitz_bound());

    for x in [0.0, 0.5, 1.3, 1.4, 2.0, 2.3, 3.0] {
        let d = loss.derivatives(x);
        println!(
            "x = {x:>4}: alpha = {:>7.3}, L = {:>9.6}, L'' = {:>9.6}, region {}",
            loss.alpha(x),
            loss.value(x),
            d.d2,
            loss.region(x)
        );
    }
    Ok(())
}
