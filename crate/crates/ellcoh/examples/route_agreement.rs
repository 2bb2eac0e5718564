//! Two independent routes to the same Betti numbers: the two-column page
//! with automorphic input versus direct group cohomology of the mapping
//! class group via the amalgam decomposition.
//!
//! Usage: cargo run --release --example route_agreement [NMAX]

use ellcoh::assemble::{assemble_e2, betti};
use ellcoh::cohomology::{dim_tables, Space};
use ellcoh::gamma::{builtin_presentation, h1_dim, prelim_route};
use std::time::Instant;

fn main() {
    let nmax: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("NMAX must be a positive integer"))
        .unwrap_or(4);

    println!("level 1: spectral route vs amalgam group cohomology");
    for n in 1..=nmax {
        let start = Instant::now();
        let spectral = betti(n, 1).expect("spectral route");
        let direct = prelim_route(n).expect("amalgam route");
        assert_eq!(spectral, direct);
        println!("  n = {n}: {spectral:?}  ({:.2?})", start.elapsed());
    }

    println!();
    println!("level 2: automorphic column vs free-group cocycles");
    let pres = builtin_presentation(2).expect("level-2 presentation");
    for n in 1..=nmax {
        let page = assemble_e2(n, 2).expect("page");
        let mults = dim_tables(n)
            .expect("tables")
            .multiplicities(Space::B)
            .expect("multiplicities");
        for d in 0..n {
            let by_cocycles: usize = (0..=mults.max_k())
                .map(|k| mults.by_degree(d, k) * h1_dim(&pres, k).expect("H1"))
                .sum();
            assert_eq!(page.column1_dim(d), by_cocycles);
        }
        println!("  n = {n}: all {} column entries agree", n);
    }
}
