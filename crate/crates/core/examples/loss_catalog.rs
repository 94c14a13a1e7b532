//! Tabulates the catalog losses side by side.

use pseudomode::loss::{LossCatalogEntry, UnivariateLoss};

fn main() -> pseudomode::Result<()> {
    let losses = [
        ("piecewise(0.5, 1, 2)", LossCatalogEntry::piecewise(0.5, 1.0, 2.0)?),
        ("pseudo-huber(1)", LossCatalogEntry::pseudo_huber(1.0)?),
        ("log-cosh(2)", LossCatalogEntry::generalized_huber(2.0, 0.0)?),
        ("smoothed-hamming(3, 2)", LossCatalogEntry::smoothed_hamming(3.0, 2.0)?),
    ];
    print!("{:>6}", "x");
    for (name, _) in &losses {
        print!("{name:>24}");
    }
    println!();
    for i in 0..=12 {
        let x = -3.0 + 0.5 * i as f64;
        print!("{x:>6.2}");
        for (_, loss) in &losses {
            print!("{:>24.6}", loss.value(x));
        }
        println!();
    }
    Ok(())
}
