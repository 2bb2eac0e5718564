//! Betti numbers of the configuration spaces modelled by the forest algebra.
//!
//! Prints, for each n, the Poincare polynomials of the cohomology H_n of the
//! full model and of its reduced quotient B_n, together with the
//! SL2-multiplicity table of B_n.
//!
//! Usage: cargo run --release --example config_space [NMAX]

use ellcoh::cohomology::{dim_tables, Space};
use std::time::Instant;

fn poly_string(coeffs: &[usize]) -> String {
    let mut parts = Vec::new();
    for (d, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        parts.push(match (d, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "t".into(),
            (1, c) => format!("{c}t"),
            (d, 1) => format!("t^{d}"),
            (d, c) => format!("{c}t^{d}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn main() {
    let nmax: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("NMAX must be a positive integer"))
        .unwrap_or(4);
    for n in 1..=nmax {
        let start = Instant::now();
        let t = dim_tables(n).expect("cohomology tables");
        println!("n = {n}  ({:.2?})", start.elapsed());
        println!("  P(H_{n}) = {}", poly_string(&t.poincare(Space::H)));
        println!("  P(B_{n}) = {}", poly_string(&t.poincare(Space::B)));
        let mults = t.multiplicities(Space::B).expect("multiplicities");
        let kmax = mults.max_k();
        print!("  B_{n} irreducibles by degree:");
        println!();
        let dmax = t.poincare(Space::B).len().saturating_sub(1);
        for d in 0..=dmax {
            let mut row = Vec::new();
            for k in 0..=kmax {
                let m = mults.by_degree(d, k);
                if m > 0 {
                    row.push(if m == 1 {
                        format!("V{k}")
                    } else {
                        format!("{m} V{k}")
                    });
                }
            }
            if !row.is_empty() {
                println!("    degree {d}: {}", row.join(" + "));
            }
        }
    }
}
