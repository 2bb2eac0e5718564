//! Free presentations of the projective principal congruence subgroups:
//! derive one by coset enumeration, compare with the shipped data, and use
//! it for group cohomology with symmetric power coefficients.
//!
//! Usage: cargo run --release --example gamma_presentations [LEVEL]

use ellcoh::gamma::{
    builtin_presentation, derive_presentation, h1_dim, parabolic_h1_dim,
};
use ellcoh::modular::w_dims;

fn main() {
    let level: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("LEVEL must be 2, 3, 4 or 5"))
        .unwrap_or(3);

    let derived = derive_presentation(level).expect("coset enumeration");
    let shipped = builtin_presentation(level).expect("shipped data");
    assert_eq!(derived, shipped, "derivation must reproduce the shipped file");

    println!("level {level}: free group of rank {}", derived.generators.len());
    for (i, g) in derived.generators.iter().enumerate() {
        let [[a, b], [c, d]] = g.as_rows();
        println!("  g{} = [{a} {b}; {c} {d}]", i + 1);
    }
    println!("cusp words (indices into the generator list, sign = inverse):");
    for w in &derived.cusp_words {
        let text: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        println!("  [{}]", text.join(", "));
    }

    println!();
    println!("H1 with symmetric power coefficients, against modular forms:");
    println!("  k | H1 | parabolic | cusp+all forms | 2 x cusp forms");
    for k in 0..=8usize {
        let h1 = h1_dim(&derived, k).expect("H1");
        let par = parabolic_h1_dim(&derived, k).expect("parabolic H1");
        let w = w_dims(k as u64, level as u64).expect("modular dims");
        println!("  {k} | {h1:2} | {par:9} | {:14} | {}", w.total, w.w_low);
        assert_eq!(h1 as i64, w.total);
        assert_eq!(par as i64, w.w_low);
    }
}
