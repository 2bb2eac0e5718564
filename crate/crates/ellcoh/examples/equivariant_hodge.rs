//! Equivariant mixed Hodge polynomial of a moduli space: the coefficient of
//! each irreducible symmetric group representation, printed per partition.
//!
//! Usage: cargo run --release --example equivariant_hodge [N] [LEVEL]

use ellcoh::assemble::moduli_record;
use num_bigint::BigInt;
use num_traits::One;

fn term_string(terms: &[(usize, usize, usize, BigInt)]) -> String {
    let mut parts = Vec::new();
    for (t, u, v, c) in terms {
        let mut s = String::new();
        if !c.is_one() || (*t == 0 && *u == 0 && *v == 0) {
            s.push_str(&c.to_string());
        }
        for (var, e) in [("t", t), ("u", u), ("v", v)] {
            match e {
                0 => {}
                1 => s.push_str(var),
                _ => s.push_str(&format!("{var}^{e}")),
            }
        }
        parts.push(s);
    }
    parts.join(" + ")
}

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map(|s| s.parse().expect("N must be a positive integer"))
        .unwrap_or(3);
    let level: u32 = args
        .next()
        .map(|s| s.parse().expect("LEVEL must be a positive integer"))
        .unwrap_or(2);

    let record = moduli_record(n, level, true).expect("moduli record");
    println!(
        "n = {n}, level = {level}: Betti numbers {:?}",
        record.betti.iter().map(|b| b.to_string()).collect::<Vec<_>>()
    );
    println!("mixed Hodge polynomial: {}", term_string(&record.poincare_serre));
    println!();
    println!("decomposition into irreducibles (partition: polynomial):");
    for (label, terms) in record.equivariant.as_ref().unwrap() {
        println!("  {label:>8}: {}", term_string(terms));
    }
}
