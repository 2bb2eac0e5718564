//! Betti numbers of the n-pointed level-N moduli spaces, tabulated over a
//! range of point counts and levels.
//!
//! Usage: cargo run --release --example moduli_betti [NMAX] [LEVELMAX]

use ellcoh::assemble::betti;
use std::time::Instant;

fn main() {
    let mut args = std::env::args().skip(1);
    let nmax: usize = args
        .next()
        .map(|s| s.parse().expect("NMAX must be a positive integer"))
        .unwrap_or(4);
    let levelmax: u32 = args
        .next()
        .map(|s| s.parse().expect("LEVELMAX must be a positive integer"))
        .unwrap_or(5);

    for n in 1..=nmax {
        let start = Instant::now();
        println!("n = {n}");
        for level in 1..=levelmax {
            let b = betti(n, level).expect("betti numbers");
            let total: usize = b.iter().sum();
            println!("  N = {level}: {b:?}  (total {total})");
        }
        println!("  ({:.2?})", start.elapsed());
    }
}
