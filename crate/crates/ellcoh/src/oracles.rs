//! Independent verification oracles.
//!
//! Everything here is deliberately implemented with different algorithms and
//! data layouts than the production modules: dense fraction-free (Bareiss)
//! elimination instead of sparse pivoted elimination, and a brute-force
//! quotient of a free graded-commutative algebra by relation ideals instead
//! of the straightened forest basis. The selftest and the test suite compare
//! the production results against these.

use crate::arith::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Rank of a dense rational matrix by fraction-free (Bareiss) elimination
/// with row and column pivot search.
pub fn dense_rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut lcm = BigInt::one();
            for x in r {
                lcm = lcm.lcm(x.denom());
            }
            r.iter().map(|x| x.numer() * &lcm / x.denom()).collect()
        })
        .collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut r = 0;
    for c in 0..ncols {
        let Some(pivot) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                let (q, rem) = num.div_rem(&prev);
                assert!(rem.is_zero(), "fraction-free division not exact");
                m[i][j] = q;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        rank += 1;
        r += 1;
        if r == nrows {
            break;
        }
    }
    rank
}

/// Free graded-commutative algebra on `gens` odd (degree-1) generators.
/// Monomials are bitmasks over generator indices, written in ascending index
/// order; elements are mask -> coefficient maps.
#[derive(Debug, Clone, Copy)]
pub struct ExteriorAlgebra {
    pub gens: usize,
}

pub type ExtElement = BTreeMap<u64, Rat>;

impl ExteriorAlgebra {
    pub fn new(gens: usize) -> Self {
        assert!(gens <= 60, "mask width exceeded");
        ExteriorAlgebra { gens }
    }

    pub fn generator(&self, i: usize) -> ExtElement {
        assert!(i < self.gens);
        let mut e = ExtElement::new();
        e.insert(1u64 << i, Rat::one());
        e
    }

    pub fn one(&self) -> ExtElement {
        let mut e = ExtElement::new();
        e.insert(0, Rat::one());
        e
    }

    /// Product of two monomial masks with the Koszul sign; None on repeats.
    pub fn mul_mask(&self, a: u64, b: u64) -> Option<(u64, i64)> {
        if a & b != 0 {
            return None;
        }
        let mut sign = 0u32;
        let mut bb = b;
        while bb != 0 {
            let bit = bb.trailing_zeros();
            sign += (a >> (bit + 1)).count_ones();
            bb &= bb - 1;
        }
        Some((a | b, if sign % 2 == 0 { 1 } else { -1 }))
    }

    pub fn mul(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        let mut out = ExtElement::new();
        for (ma, ca) in x {
            for (mb, cb) in y {
                if let Some((m, s)) = self.mul_mask(*ma, *mb) {
                    let term = ca * cb * Rat::from_integer(BigInt::from(s));
                    let e = out.entry(m).or_insert_with(Rat::zero);
                    *e += term;
                    if e.is_zero() {
                        out.remove(&m);
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, x: &mut ExtElement, y: &ExtElement, c: &Rat) {
        for (m, v) in y {
            let e = x.entry(*m).or_insert_with(Rat::zero);
            *e += v * c;
            if e.is_zero() {
                x.remove(m);
            }
        }
    }

    fn degree_masks(&self, d: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for m in 0..(1u64 << self.gens) {
            if m.count_ones() as usize == d {
                out.push(m);
            }
        }
        out
    }

    /// Spanning vectors (dense, over the degree-d monomial basis) of the
    /// degree-d component of the two-sided ideal generated by `relations`.
    pub fn ideal_component(&self, relations: &[ExtElement], d: usize) -> Vec<Vec<Rat>> {
        let masks = self.degree_masks(d);
        let index: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut span = Vec::new();
        for rel in relations {
            let rel_deg = rel
                .keys()
                .next()
                .map(|m| m.count_ones() as usize)
                .unwrap_or(0);
            if rel_deg > d {
                continue;
            }
            for cof_mask in self.degree_masks(d - rel_deg) {
                let mut cof = ExtElement::new();
                cof.insert(cof_mask, Rat::one());
                let prod = self.mul(rel, &cof);
                if prod.is_empty() {
                    continue;
                }
                let mut dense = vec![Rat::zero(); masks.len()];
                for (m, c) in &prod {
                    dense[index[m]] = c.clone();
                }
                span.push(dense);
            }
        }
        span
    }

    /// Dimension of each graded piece of the quotient by the relation ideal.
    pub fn quotient_dims(&self, relations: &[ExtElement]) -> Vec<usize> {
        (0..=self.gens)
            .map(|d| {
                let total = self.degree_masks(d).len();
                let span = self.ideal_component(relations, d);
                total - dense_rank(&span)
            })
            .collect()
    }

    /// Whether a homogeneous element lies in the relation ideal.
    pub fn in_ideal(&self, relations: &[ExtElement], elem: &ExtElement) -> bool {
        if elem.is_empty() {
            return true;
        }
        let d = elem.keys().next().map(|m| m.count_ones() as usize).unwrap();
        if elem.keys().any(|m| m.count_ones() as usize != d) {
            panic!("in_ideal expects a homogeneous element");
        }
        let masks = self.degree_masks(d);
        let index: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let span = self.ideal_component(relations, d);
        let base_rank = dense_rank(&span);
        let mut dense = vec![Rat::zero(); masks.len()];
        for (m, c) in elem {
            dense[index[m]] = c.clone();
        }
        let mut with = span;
        with.push(dense);
        dense_rank(&with) == base_rank
    }
}

/// Generator indexing for the free model of the forest algebra on n points:
/// a_i -> 2(i-1), b_i -> 2(i-1)+1, Delta_{ij} (i<j) -> 2n + pair_index.
#[derive(Debug, Clone)]
pub struct FreeForestModel {
    pub n: usize,
    pub alg: ExteriorAlgebra,
    pairs: Vec<(usize, usize)>,
}

impl FreeForestModel {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                pairs.push((i, j));
            }
        }
        let gens = 2 * n + pairs.len();
        FreeForestModel {
            n,
            alg: ExteriorAlgebra::new(gens),
            pairs,
        }
    }

    pub fn a(&self, i: usize) -> ExtElement {
        self.alg.generator(2 * (i - 1))
    }

    pub fn b(&self, i: usize) -> ExtElement {
        self.alg.generator(2 * (i - 1) + 1)
    }

    pub fn delta(&self, i: usize, j: usize) -> ExtElement {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let idx = self
            .pairs
            .iter()
            .position(|&p| p == (lo, hi))
            .expect("valid pair");
        self.alg.generator(2 * self.n + idx)
    }

    /// Defining relations: Arnold for each triple, and edge transport of
    /// decorations Delta_{ij} a_i = Delta_{ij} a_j (same for b).
    pub fn relations(&self) -> Vec<ExtElement> {
        let mut rels = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                for k in j + 1..=self.n {
                    // d_ij d_jk + d_jk d_ki + d_ki d_ij
                    let mut r = self.alg.mul(&self.delta(i, j), &self.delta(j, k));
                    self.alg.add_scaled(
                        &mut r,
                        &self.alg.mul(&self.delta(j, k), &self.delta(k, i)),
                        &Rat::one(),
                    );
                    self.alg.add_scaled(
                        &mut r,
                        &self.alg.mul(&self.delta(k, i), &self.delta(i, j)),
                        &Rat::one(),
                    );
                    rels.push(r);
                }
            }
        }
        for &(i, j) in &self.pairs {
            for dec in [true, false] {
                let (xi, xj) = if dec {
                    (self.a(i), self.a(j))
                } else {
                    (self.b(i), self.b(j))
                };
                let mut r = self.alg.mul(&self.delta(i, j), &xi);
                self.alg
                    .add_scaled(&mut r, &self.alg.mul(&self.delta(i, j), &xj), &-Rat::one());
                rels.push(r);
            }
        }
        rels.retain(|r| !r.is_empty());
        rels
    }

    /// Relations of the graph arrangement part only (Delta generators with
    /// Arnold relations), as elements of a smaller exterior algebra.
    pub fn arrangement_relations(&self) -> (ExteriorAlgebra, Vec<ExtElement>) {
        let alg = ExteriorAlgebra::new(self.pairs.len());
        let gen = |i: usize, j: usize| -> ExtElement {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            let idx = self.pairs.iter().position(|&p| p == (lo, hi)).unwrap();
            alg.generator(idx)
        };
        let mut rels = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                for k in j + 1..=self.n {
                    let mut r = alg.mul(&gen(i, j), &gen(j, k));
                    for (x, y) in [((j, k), (k, i)), ((k, i), (i, j))] {
                        let p = alg.mul(&gen(x.0, x.1), &gen(y.0, y.1));
                        for (m, c) in p {
                            let e = r.entry(m).or_insert_with(Rat::zero);
                            *e += c;
                            if e.is_zero() {
                                r.remove(&m);
                            }
                        }
                    }
                    rels.push(r);
                }
            }
        }
        rels.retain(|r| !r.is_empty());
        (alg, rels)
    }
}
