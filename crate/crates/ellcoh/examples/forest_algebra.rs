//! Tour of the forest algebra A_n: generators, relations, the differential
//! and the graded basis of admissible forests.
//!
//! Usage: cargo run --release --example forest_algebra [N]

use ellcoh::arith::rat_i64;
use ellcoh::forest::{
    basis_table, differential, dim_closed_form, AlgebraElement, Gen,
};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("N must be a positive integer"))
        .unwrap_or(3);

    let a1 = AlgebraElement::generator(n, Gen::A(1)).unwrap();
    let b2 = AlgebraElement::generator(n, Gen::B(2)).unwrap();
    let d12 = AlgebraElement::generator(n, Gen::D(1, 2)).unwrap();

    println!("working in A_{n}, total dimension {}", dim_closed_form(n));
    println!();
    println!("sample products (odd generators anticommute):");
    println!("  a1 * b2        = {}", a1.mul(&b2).unwrap());
    println!("  b2 * a1        = {}", b2.mul(&a1).unwrap());
    println!("  a1 * a1        = {}", a1.mul(&a1).unwrap());
    println!("  d(1,2) * a1    = {}", d12.mul(&a1).unwrap());
    println!("  d(1,2)^2       = {}", d12.mul(&d12).unwrap());
    println!();
    println!("the differential sends d(i,j) to a relation-compatible square:");
    println!("  d d(1,2)       = {}", differential(&d12).unwrap());
    let prod = d12.mul(&a1.mul(&b2).unwrap()).unwrap();
    println!("  d(d(1,2) a1 b2) = {}", differential(&prod).unwrap());

    // d^2 = 0 on a dense element: the sum of everything interesting
    let mut x = AlgebraElement::zero(n);
    x.add_assign(&a1);
    x.add_assign(&b2);
    x.add_assign(&d12);
    x.add_assign(&prod.scaled(&rat_i64(7)));
    let ddx = differential(&differential(&x).unwrap()).unwrap();
    println!();
    println!("d(d(x)) for a mixed element x: {}", ddx);
    assert!(ddx.is_zero());

    println!();
    println!("graded blocks of A_{n} (p = odd letters, q = edges, h = sl2 weight):");
    let table = basis_table(n);
    for (block, monos) in &table.blocks {
        println!(
            "  p={} q={} h={:>2}: dim {}",
            block.p,
            block.q,
            block.h,
            monos.len()
        );
    }
    let total: usize = table.blocks.values().map(|m| m.len()).sum();
    println!("total {total}");
    assert_eq!(total as u128, dim_closed_form(n));
}
