//! Dimension formulas for modular form spaces of principal congruence
//! subgroups, with the curve invariants they derive from.
//!
//! Usage: cargo run --release --example modular_dims [LEVELMAX] [KMAX]

use ellcoh::modular::{dims, gamma_data, w_dims};

fn main() {
    let mut args = std::env::args().skip(1);
    let levelmax: u64 = args
        .next()
        .map(|s| s.parse().expect("LEVELMAX must be a positive integer"))
        .unwrap_or(6);
    let kmax: u64 = args
        .next()
        .map(|s| s.parse().expect("KMAX must be a positive integer"))
        .unwrap_or(10);

    for level in 1..=levelmax {
        let gd = gamma_data(level).expect("curve data");
        println!(
            "level {level}: index {}, projective index {}, cusps {}, genus {}",
            gd.mu, gd.mu_bar, gd.eps_inf, gd.genus
        );
        println!("  weight | cusp forms | all forms");
        for k in 2..=kmax {
            let d = dims(k, level).expect("dimensions");
            println!("  {k:6} | {:10} | {:9}", d.s, d.g);
        }
        // the same data graded by weight on cohomology of local systems
        println!("  symmetric power k -> H1 dims (low, high, total):");
        for k in 0..=kmax.min(6) {
            let w = w_dims(k, level).expect("H1 dimensions");
            println!("  {k:6} -> ({}, {}, {})", w.w_low, w.w_high, w.total);
        }
        println!();
    }
}
