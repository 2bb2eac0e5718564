//! The forest algebra on n points.
//!
//! Generators a_i, b_i (one pair per point) and Delta_ij, all odd of degree
//! 1, subject to: Delta_ij = Delta_ji; the Arnold relation
//! Delta_ij Delta_jk + Delta_jk Delta_ki + Delta_ki Delta_ij = 0; and
//! Delta_ij a_i = Delta_ij a_j (same for b). The monomial basis consists of
//! admissible decorated forests: edge sets whose larger endpoints are
//! pairwise distinct, with a subset of {A, B} attached to the minimal vertex
//! (root) of each tree component.
//!
//! Canonical order inside a monomial: edges lexicographically, then
//! decorations by (vertex, A before B). All sign bookkeeping is relative to
//! this order. The differential d sends Delta_ij to
//! b_i a_i + b_j a_j - b_i a_j - b_j a_i and kills a, b; it shifts the
//! bigrading (p, q) = (#decorations, #edges) by (+2, -1) and preserves both
//! the H-weight #A - #B and the weight p + 2q.

use crate::arith::{rat_i64, Rat};
use crate::error::{Error, Result};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Generator symbol. Vertices are 1-based and fit in u8 (n <= 8 in practice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    A(u8),
    B(u8),
    D(u8, u8),
}

impl Gen {
    /// Key realizing the canonical word order: edges first (lex), then
    /// decorations by (vertex, A before B).
    fn sort_key(&self) -> (u8, u8, u8) {
        match *self {
            Gen::D(i, j) => (0, i, j),
            Gen::A(v) => (1, v, 0),
            Gen::B(v) => (1, v, 1),
        }
    }
}

/// Decoration kind at a component root; A sorts before B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dec {
    A,
    B,
}

/// A canonical basis monomial: admissible forest plus root decorations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Edges (i, j) with i < j, sorted lexicographically; larger endpoints
    /// are pairwise distinct.
    pub edges: Vec<(u8, u8)>,
    /// Decorations (vertex, kind), sorted; vertices are component roots.
    pub decs: Vec<(u8, Dec)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            edges: Vec::new(),
            decs: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.decs.len()
    }

    pub fn q(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self) -> usize {
        self.p() + self.q()
    }

    pub fn weight(&self) -> usize {
        self.p() + 2 * self.q()
    }

    pub fn h_weight(&self) -> i64 {
        let a = self.decs.iter().filter(|d| d.1 == Dec::A).count() as i64;
        let b = self.decs.len() as i64 - a;
        a - b
    }

    pub fn block(&self) -> GradedBlockIndex {
        GradedBlockIndex {
            p: self.p(),
            q: self.q(),
            h: self.h_weight(),
        }
    }

    /// The monomial as a word in canonical order.
    pub fn word(&self) -> Vec<Gen> {
        let mut w: Vec<Gen> = self.edges.iter().map(|&(i, j)| Gen::D(i, j)).collect();
        w.extend(self.decs.iter().map(|&(v, d)| match d {
            Dec::A => Gen::A(v),
            Dec::B => Gen::B(v),
        }));
        w
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() && self.decs.is_empty() {
            return write!(f, "1");
        }
        for &(i, j) in &self.edges {
            write!(f, "d{i}{j}")?;
        }
        for &(v, d) in &self.decs {
            match d {
                Dec::A => write!(f, "a{v}")?,
                Dec::B => write!(f, "b{v}")?,
            }
        }
        Ok(())
    }
}

/// Block of the (p, q, H-weight) tri-grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedBlockIndex {
    pub p: usize,
    pub q: usize,
    pub h: i64,
}

impl GradedBlockIndex {
    pub fn degree(&self) -> usize {
        self.p + self.q
    }

    pub fn weight(&self) -> usize {
        self.p + 2 * self.q
    }
}

/// An element of the algebra: finite rational combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub n: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        let mut e = AlgebraElement::zero(n);
        e.add_monomial(Monomial::one(), rat_i64(1));
        e
    }

    pub fn generator(n: usize, g: Gen) -> Result<Self> {
        normalize(n, &[g], &rat_i64(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_monomial(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &AlgebraElement) {
        assert_eq!(self.n, other.n);
        for (m, c) in &other.terms {
            self.add_monomial(m.clone(), c.clone());
        }
    }

    pub fn scaled(&self, c: &Rat) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// Graded-commutative product; circuits die by straightening.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.n != other.n {
            return Err(Error::invalid("product of elements with different n"));
        }
        let mut out = AlgebraElement::zero(self.n);
        for (m1, c1) in &self.terms {
            let w1 = m1.word();
            for (m2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend(m2.word());
                out.add_assign(&normalize(self.n, &w, &(c1 * c2))?);
            }
        }
        Ok(out)
    }

    /// Restrict to one tri-graded block.
    pub fn block_part(&self, b: GradedBlockIndex) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n);
        for (m, c) in &self.terms {
            if m.block() == b {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

fn check_gen(n: usize, g: Gen) -> Result<()> {
    let ok = |v: u8| v >= 1 && (v as usize) <= n;
    match g {
        Gen::A(v) | Gen::B(v) if ok(v) => Ok(()),
        Gen::D(i, j) if ok(i) && ok(j) && i != j => Ok(()),
        _ => Err(Error::invalid(format!("bad generator {g:?} for n={n}"))),
    }
}

/// Sort a word into canonical order by adjacent swaps; returns true if the
/// permutation used was odd (all letters are odd, so the sign is the parity).
fn sort_word(w: &mut [Gen]) -> bool {
    let mut neg = false;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1].sort_key() > w[j].sort_key() {
            w.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    neg
}

/// Straighten an arbitrary word of generators times a coefficient into
/// canonical monomials.
///
/// Loop invariant: the stack holds pending (coefficient, word) pairs whose
/// signed sum equals the input. Each pass sorts with sign, kills repeated
/// letters, applies one Arnold rewrite at the largest repeated larger
/// endpoint (the multiset of larger endpoints strictly decreases, so this
/// terminates), then transports decorations to component roots (in-place
/// letter replacement, which is sign-free because the letter parity and
/// position are unchanged).
pub fn normalize(n: usize, word: &[Gen], coeff: &Rat) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(n);
    if coeff.is_zero() {
        return Ok(out);
    }
    let mut start: Vec<Gen> = Vec::with_capacity(word.len());
    for &g in word {
        check_gen(n, g)?;
        start.push(match g {
            Gen::D(i, j) if i > j => Gen::D(j, i),
            other => other,
        });
    }
    let mut stack: Vec<(Rat, Vec<Gen>)> = vec![(coeff.clone(), start)];
    while let Some((c, mut w)) = stack.pop() {
        let neg = sort_word(&mut w);
        let c = if neg { -c } else { c };
        if w.windows(2).any(|p| p[0] == p[1]) {
            continue;
        }
        // Arnold straightening at the largest repeated larger endpoint.
        let mut by_hi: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for (pos, g) in w.iter().enumerate() {
            if let Gen::D(_, j) = g {
                by_hi.entry(*j).or_default().push(pos);
            }
        }
        if let Some((_, positions)) = by_hi.iter().rev().find(|(_, v)| v.len() >= 2) {
            let (s, t) = (positions[0], positions[1]);
            let (Gen::D(i, k), Gen::D(j, _)) = (w[s], w[t]) else {
                unreachable!()
            };
            let eps_neg = (s + t - 1) % 2 == 1;
            let base = if eps_neg { -c } else { c };
            let mut rest: Vec<Gen> = Vec::with_capacity(w.len() - 2);
            for (pos, g) in w.iter().enumerate() {
                if pos != s && pos != t {
                    rest.push(*g);
                }
            }
            // D_ik D_jk = D_ij D_jk - D_ij D_ik  (i < j < k)
            let mut w1 = vec![Gen::D(i, j), Gen::D(j, k)];
            w1.extend_from_slice(&rest);
            let mut w2 = vec![Gen::D(i, j), Gen::D(i, k)];
            w2.extend_from_slice(&rest);
            stack.push((base.clone(), w1));
            stack.push((-base, w2));
            continue;
        }
        // Decoration transport along parent edges to component roots.
        let parent: BTreeMap<u8, u8> = w
            .iter()
            .filter_map(|g| match g {
                Gen::D(i, j) => Some((*j, *i)),
                _ => None,
            })
            .collect();
        let mut changed = false;
        for g in w.iter_mut() {
            let (mut v, is_a) = match *g {
                Gen::A(v) => (v, true),
                Gen::B(v) => (v, false),
                Gen::D(..) => continue,
            };
            while let Some(&u) = parent.get(&v) {
                v = u;
                changed = true;
            }
            *g = if is_a { Gen::A(v) } else { Gen::B(v) };
        }
        if changed {
            stack.push((c, w));
            continue;
        }
        // Emit: the word is a canonical monomial.
        let mut edges = Vec::new();
        let mut decs = Vec::new();
        for g in &w {
            match *g {
                Gen::D(i, j) => edges.push((i, j)),
                Gen::A(v) => decs.push((v, Dec::A)),
                Gen::B(v) => decs.push((v, Dec::B)),
            }
        }
        out.add_monomial(Monomial { edges, decs }, c);
    }
    Ok(out)
}

/// The differential: odd derivation with d(a) = d(b) = 0 and
/// d(Delta_ij) = b_i a_i + b_j a_j - b_i a_j - b_j a_i.
pub fn differential(x: &AlgebraElement) -> Result<AlgebraElement> {
    let n = x.n;
    let mut out = AlgebraElement::zero(n);
    for (m, c) in x.terms() {
        let w = m.word();
        for (pos, g) in w.iter().enumerate() {
            let Gen::D(i, j) = *g else { continue };
            let leibniz_neg = pos % 2 == 1;
            let pieces: [(Gen, Gen, i64); 4] = [
                (Gen::B(i), Gen::A(i), 1),
                (Gen::B(j), Gen::A(j), 1),
                (Gen::B(i), Gen::A(j), -1),
                (Gen::B(j), Gen::A(i), -1),
            ];
            for (gb, ga, sign) in pieces {
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.extend_from_slice(&w[..pos]);
                nw.push(gb);
                nw.push(ga);
                nw.extend_from_slice(&w[pos + 1..]);
                let s = if leibniz_neg { -sign } else { sign };
                out.add_assign(&normalize(n, &nw, &(c * rat_i64(s)))?);
            }
        }
    }
    Ok(out)
}

/// The sl2 generators acting as even derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Gen {
    X,
    Y,
    H,
}

/// Apply X, Y or H: X a = 0, X b = a; Y a = b, Y b = 0; H a = a, H b = -b;
/// all three kill Delta.
pub fn act_sl2(op: Sl2Gen, x: &AlgebraElement) -> Result<AlgebraElement> {
    let n = x.n;
    let mut out = AlgebraElement::zero(n);
    for (m, c) in x.terms() {
        let w = m.word();
        for (pos, g) in w.iter().enumerate() {
            let replacement: Option<(Gen, i64)> = match (op, *g) {
                (Sl2Gen::X, Gen::B(v)) => Some((Gen::A(v), 1)),
                (Sl2Gen::Y, Gen::A(v)) => Some((Gen::B(v), 1)),
                (Sl2Gen::H, Gen::A(v)) => Some((Gen::A(v), 1)),
                (Sl2Gen::H, Gen::B(v)) => Some((Gen::B(v), -1)),
                _ => None,
            };
            let Some((ng, sign)) = replacement else {
                continue;
            };
            let mut nw = w.clone();
            nw[pos] = ng;
            out.add_assign(&normalize(n, &nw, &(c * rat_i64(sign)))?);
        }
    }
    Ok(out)
}

/// Apply a group element of SL2(Z) as an algebra map:
/// g a_i = a a_i + c b_i, g b_i = b a_i + d b_i, g Delta = Delta
/// for g = [[a, b], [c, d]].
pub fn act_matrix(g: [[i64; 2]; 2], x: &AlgebraElement) -> Result<AlgebraElement> {
    let [[a, b], [c, d]] = g;
    if a * d - b * c != 1 {
        return Err(Error::invalid(format!("matrix {g:?} is not unimodular")));
    }
    let n = x.n;
    let mut out = AlgebraElement::zero(n);
    for (m, coeff) in x.terms() {
        let mut expansions: Vec<(Rat, Vec<Gen>)> = vec![(coeff.clone(), Vec::new())];
        for gen in m.word() {
            let images: Vec<(i64, Gen)> = match gen {
                Gen::A(v) => vec![(a, Gen::A(v)), (c, Gen::B(v))],
                Gen::B(v) => vec![(b, Gen::A(v)), (d, Gen::B(v))],
                Gen::D(i, j) => vec![(1, Gen::D(i, j))],
            };
            let mut next = Vec::with_capacity(expansions.len() * images.len());
            for (cur_c, cur_w) in &expansions {
                for &(scale, img) in &images {
                    if scale == 0 {
                        continue;
                    }
                    let mut w = cur_w.clone();
                    w.push(img);
                    next.push((cur_c * rat_i64(scale), w));
                }
            }
            expansions = next;
        }
        for (c2, w) in expansions {
            out.add_assign(&normalize(n, &w, &c2)?);
        }
    }
    Ok(out)
}

/// Apply a permutation of the points, given as a 0-indexed image array.
pub fn act_perm(perm: &[usize], x: &AlgebraElement) -> Result<AlgebraElement> {
    let n = x.n;
    if perm.len() != n {
        return Err(Error::invalid("permutation length differs from n"));
    }
    let mut seen = vec![false; n];
    for &im in perm {
        if im >= n || seen[im] {
            return Err(Error::invalid("not a permutation"));
        }
        seen[im] = true;
    }
    let map = |v: u8| -> u8 { (perm[(v - 1) as usize] + 1) as u8 };
    let mut out = AlgebraElement::zero(n);
    for (m, c) in x.terms() {
        let w: Vec<Gen> = m
            .word()
            .into_iter()
            .map(|g| match g {
                Gen::A(v) => Gen::A(map(v)),
                Gen::B(v) => Gen::B(map(v)),
                Gen::D(i, j) => Gen::D(map(i), map(j)),
            })
            .collect();
        out.add_assign(&normalize(n, &w, c)?);
    }
    Ok(out)
}

/// The classes sum of a_i and sum of b_i generating the ideal cut out in the
/// cohomology.
pub fn sum_a(n: usize) -> AlgebraElement {
    let mut e = AlgebraElement::zero(n);
    for v in 1..=n {
        e.add_monomial(
            Monomial {
                edges: vec![],
                decs: vec![(v as u8, Dec::A)],
            },
            rat_i64(1),
        );
    }
    e
}

pub fn sum_b(n: usize) -> AlgebraElement {
    let mut e = AlgebraElement::zero(n);
    for v in 1..=n {
        e.add_monomial(
            Monomial {
                edges: vec![],
                decs: vec![(v as u8, Dec::B)],
            },
            rat_i64(1),
        );
    }
    e
}

/// Enumerate admissible forests on n vertices: for each vertex v = 2..n
/// either no edge with larger endpoint v, or one edge (lo, v). Distinct
/// larger endpoints force the edge set to be a forest.
fn enum_forests(n: usize, q_filter: Option<usize>, f: &mut impl FnMut(&[(u8, u8)])) {
    fn rec(
        n: usize,
        v: usize,
        q_filter: Option<usize>,
        edges: &mut Vec<(u8, u8)>,
        f: &mut impl FnMut(&[(u8, u8)]),
    ) {
        if let Some(q) = q_filter {
            let max_more = (n + 1).saturating_sub(v);
            if edges.len() > q || edges.len() + max_more < q {
                return;
            }
        }
        if v > n {
            f(edges);
            return;
        }
        rec(n, v + 1, q_filter, edges, f);
        for lo in 1..v {
            edges.push((lo as u8, v as u8));
            rec(n, v + 1, q_filter, edges, f);
            edges.pop();
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut edges = Vec::new();
    rec(n, 2, q_filter, &mut edges, f);
}

fn forest_roots(n: usize, edges: &[(u8, u8)]) -> Vec<u8> {
    let mut is_larger = vec![false; n + 1];
    for &(_, j) in edges {
        is_larger[j as usize] = true;
    }
    (1..=n as u8).filter(|&v| !is_larger[v as usize]).collect()
}

/// Deterministic enumeration of the monomials of one (p, q, h) block.
pub fn block_basis(n: usize, block: GradedBlockIndex) -> Vec<Monomial> {
    let mut out = Vec::new();
    enum_forests(n, Some(block.q), &mut |edges| {
        let roots = forest_roots(n, edges);
        let mut sorted_edges = edges.to_vec();
        sorted_edges.sort_unstable();
        // assign one of {}, {A}, {B}, {A,B} to each root, pruned by (p, h)
        fn assign(
            roots: &[u8],
            idx: usize,
            p_left: isize,
            decs: &mut Vec<(u8, Dec)>,
            h_now: i64,
            target_h: i64,
            edges: &Vec<(u8, u8)>,
            out: &mut Vec<Monomial>,
        ) {
            let rest = roots.len() - idx;
            if p_left < 0 || p_left > 2 * rest as isize {
                return;
            }
            if (h_now - target_h).unsigned_abs() as usize > rest.min(p_left.max(0) as usize) {
                return;
            }
            if idx == roots.len() {
                if p_left == 0 && h_now == target_h {
                    out.push(Monomial {
                        edges: edges.clone(),
                        decs: decs.clone(),
                    });
                }
                return;
            }
            let r = roots[idx];
            assign(roots, idx + 1, p_left, decs, h_now, target_h, edges, out);
            decs.push((r, Dec::A));
            assign(roots, idx + 1, p_left - 1, decs, h_now + 1, target_h, edges, out);
            decs.pop();
            decs.push((r, Dec::B));
            assign(roots, idx + 1, p_left - 1, decs, h_now - 1, target_h, edges, out);
            decs.pop();
            decs.push((r, Dec::A));
            decs.push((r, Dec::B));
            assign(roots, idx + 1, p_left - 2, decs, h_now, target_h, edges, out);
            decs.pop();
            decs.pop();
        }
        let mut decs = Vec::new();
        assign(
            &roots,
            0,
            block.p as isize,
            &mut decs,
            0,
            block.h,
            &sorted_edges,
            &mut out,
        );
    });
    out
}

/// All monomials of the algebra grouped by block, with per-block index maps.
#[derive(Debug)]
pub struct BasisTable {
    pub n: usize,
    pub blocks: BTreeMap<GradedBlockIndex, Vec<Monomial>>,
    pub index: BTreeMap<GradedBlockIndex, HashMap<Monomial, usize>>,
}

impl BasisTable {
    pub fn block(&self, b: GradedBlockIndex) -> &[Monomial] {
        self.blocks.get(&b).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn block_dim(&self, b: GradedBlockIndex) -> usize {
        self.block(b).len()
    }

    pub fn total_dim(&self) -> u128 {
        self.blocks.values().map(|v| v.len() as u128).sum()
    }
}

fn build_table(n: usize) -> BasisTable {
    let mut blocks: BTreeMap<GradedBlockIndex, Vec<Monomial>> = BTreeMap::new();
    enum_forests(n, None, &mut |edges| {
        let roots = forest_roots(n, edges);
        let mut sorted_edges = edges.to_vec();
        sorted_edges.sort_unstable();
        fn assign(
            roots: &[u8],
            idx: usize,
            decs: &mut Vec<(u8, Dec)>,
            edges: &Vec<(u8, u8)>,
            blocks: &mut BTreeMap<GradedBlockIndex, Vec<Monomial>>,
        ) {
            if idx == roots.len() {
                let m = Monomial {
                    edges: edges.clone(),
                    decs: decs.clone(),
                };
                blocks.entry(m.block()).or_default().push(m);
                return;
            }
            let r = roots[idx];
            assign(roots, idx + 1, decs, edges, blocks);
            decs.push((r, Dec::A));
            assign(roots, idx + 1, decs, edges, blocks);
            decs.pop();
            decs.push((r, Dec::B));
            assign(roots, idx + 1, decs, edges, blocks);
            decs.pop();
            decs.push((r, Dec::A));
            decs.push((r, Dec::B));
            assign(roots, idx + 1, decs, edges, blocks);
            decs.pop();
            decs.pop();
        }
        let mut decs = Vec::new();
        assign(&roots, 0, &mut decs, &sorted_edges, &mut blocks);
    });
    let index = blocks
        .iter()
        .map(|(b, monos)| {
            let m: HashMap<Monomial, usize> = monos
                .iter()
                .enumerate()
                .map(|(i, mo)| (mo.clone(), i))
                .collect();
            (*b, m)
        })
        .collect();
    BasisTable { n, blocks, index }
}

/// Memoized full basis table; intended for n <= 6 (60480 monomials at n=6).
pub fn basis_table(n: usize) -> Arc<BasisTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BasisTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let table = Arc::new(build_table(n));
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| table.clone())
        .clone()
}

/// Total dimension of the algebra, counted per forest without materializing
/// monomials: each forest with c components contributes 4^c.
pub fn dim_total(n: usize) -> u128 {
    let mut total: u128 = 0;
    enum_forests(n, None, &mut |edges| {
        let comps = n - edges.len();
        total += 1u128 << (2 * comps);
    });
    total
}

/// The closed form prod_{i=0}^{n-1} (4 + i).
pub fn dim_closed_form(n: usize) -> u128 {
    (0..n).map(|i| (4 + i) as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{ExtElement, FreeForestModel};

    fn elem(n: usize, word: &[Gen]) -> AlgebraElement {
        normalize(n, word, &rat_i64(1)).unwrap()
    }

    fn mono(edges: &[(u8, u8)], decs: &[(u8, Dec)]) -> Monomial {
        Monomial {
            edges: edges.to_vec(),
            decs: decs.to_vec(),
        }
    }

    #[test]
    fn square_of_odd_generator_is_zero() {
        assert!(elem(2, &[Gen::D(1, 2), Gen::D(1, 2)]).is_zero());
        assert!(elem(1, &[Gen::A(1), Gen::A(1)]).is_zero());
    }

    #[test]
    fn arnold_straightening() {
        // d13 d23 = d12 d23 - d12 d13
        let e = elem(3, &[Gen::D(1, 3), Gen::D(2, 3)]);
        assert_eq!(e.coeff(&mono(&[(1, 2), (2, 3)], &[])), rat_i64(1));
        assert_eq!(e.coeff(&mono(&[(1, 2), (1, 3)], &[])), rat_i64(-1));
        assert_eq!(e.terms().count(), 2);
    }

    #[test]
    fn decoration_transport_with_sign() {
        // a2 d12 = -d12 a2 = -d12 a1
        let e = elem(2, &[Gen::A(2), Gen::D(1, 2)]);
        assert_eq!(e.coeff(&mono(&[(1, 2)], &[(1, Dec::A)])), rat_i64(-1));
        assert_eq!(e.terms().count(), 1);
    }

    #[test]
    fn delta_is_symmetric() {
        let e = elem(2, &[Gen::D(2, 1)]);
        assert_eq!(e.coeff(&mono(&[(1, 2)], &[])), rat_i64(1));
    }

    #[test]
    fn unit_multiplication() {
        let x = elem(3, &[Gen::D(1, 2), Gen::A(3)]);
        let one = AlgebraElement::one(3);
        assert_eq!(one.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&one).unwrap(), x);
    }

    #[test]
    fn circuit_product_dies() {
        let d12 = elem(3, &[Gen::D(1, 2)]);
        let rest = elem(3, &[Gen::D(2, 3), Gen::D(1, 3)]);
        assert!(d12.mul(&rest).unwrap().is_zero());
    }

    #[test]
    fn exterior_square_on_one_point() {
        let a = elem(1, &[Gen::A(1)]);
        let b = elem(1, &[Gen::B(1)]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.coeff(&mono(&[], &[(1, Dec::A), (1, Dec::B)])), rat_i64(1));
        let ba = b.mul(&a).unwrap();
        assert_eq!(ba.coeff(&mono(&[], &[(1, Dec::A), (1, Dec::B)])), rat_i64(-1));
    }

    #[test]
    fn differential_of_generators() {
        assert!(differential(&elem(1, &[Gen::A(1)])).unwrap().is_zero());
        assert!(differential(&elem(1, &[Gen::B(1)])).unwrap().is_zero());
        let d = differential(&elem(2, &[Gen::D(1, 2)])).unwrap();
        assert_eq!(d.coeff(&mono(&[], &[(1, Dec::A), (1, Dec::B)])), rat_i64(-1));
        assert_eq!(d.coeff(&mono(&[], &[(2, Dec::A), (2, Dec::B)])), rat_i64(-1));
        assert_eq!(d.coeff(&mono(&[], &[(1, Dec::B), (2, Dec::A)])), rat_i64(-1));
        assert_eq!(d.coeff(&mono(&[], &[(1, Dec::A), (2, Dec::B)])), rat_i64(1));
        assert_eq!(d.terms().count(), 4);
    }

    #[test]
    fn d_squared_vanishes_on_all_monomials_n3() {
        let table = basis_table(3);
        for monos in table.blocks.values() {
            for m in monos {
                let mut e = AlgebraElement::zero(3);
                e.add_monomial(m.clone(), rat_i64(1));
                let dd = differential(&differential(&e).unwrap()).unwrap();
                assert!(dd.is_zero(), "d^2 != 0 on {m}");
            }
        }
    }

    #[test]
    fn differential_shifts_bigrading() {
        let table = basis_table(3);
        for (block, monos) in &table.blocks {
            for m in monos {
                let mut e = AlgebraElement::zero(3);
                e.add_monomial(m.clone(), rat_i64(1));
                let de = differential(&e).unwrap();
                for (t, _) in de.terms() {
                    assert_eq!(t.p(), block.p + 2);
                    assert_eq!(t.q() + 1, block.q);
                    assert_eq!(t.h_weight(), block.h);
                }
            }
        }
    }

    #[test]
    fn sl2_action_rules() {
        let a1 = elem(1, &[Gen::A(1)]);
        let b1 = elem(1, &[Gen::B(1)]);
        assert_eq!(act_sl2(Sl2Gen::H, &a1).unwrap(), a1);
        assert_eq!(act_sl2(Sl2Gen::H, &b1).unwrap(), b1.scaled(&rat_i64(-1)));
        assert_eq!(act_sl2(Sl2Gen::X, &b1).unwrap(), a1);
        assert!(act_sl2(Sl2Gen::X, &a1).unwrap().is_zero());
        assert_eq!(act_sl2(Sl2Gen::Y, &a1).unwrap(), b1);
        assert!(act_sl2(Sl2Gen::Y, &b1).unwrap().is_zero());
    }

    #[test]
    fn sl2_commutators_on_all_monomials_n3() {
        let table = basis_table(3);
        for monos in table.blocks.values() {
            for m in monos {
                let mut e = AlgebraElement::zero(3);
                e.add_monomial(m.clone(), rat_i64(1));
                let xy = act_sl2(Sl2Gen::X, &act_sl2(Sl2Gen::Y, &e).unwrap()).unwrap();
                let yx = act_sl2(Sl2Gen::Y, &act_sl2(Sl2Gen::X, &e).unwrap()).unwrap();
                let h = act_sl2(Sl2Gen::H, &e).unwrap();
                let mut lhs = xy;
                lhs.add_assign(&yx.scaled(&rat_i64(-1)));
                assert_eq!(lhs, h, "[X,Y] != H on {m}");

                let hx = act_sl2(Sl2Gen::H, &act_sl2(Sl2Gen::X, &e).unwrap()).unwrap();
                let xh = act_sl2(Sl2Gen::X, &act_sl2(Sl2Gen::H, &e).unwrap()).unwrap();
                let x2 = act_sl2(Sl2Gen::X, &e).unwrap().scaled(&rat_i64(2));
                let mut comm = hx;
                comm.add_assign(&xh.scaled(&rat_i64(-1)));
                assert_eq!(comm, x2, "[H,X] != 2X on {m}");
            }
        }
    }

    #[test]
    fn matrix_action_is_multiplicative() {
        let s = [[0, -1], [1, 0]];
        let t = [[1, 1], [0, 1]];
        let st = [[0, -1], [1, 1]];
        let x = elem(2, &[Gen::A(1), Gen::D(1, 2), Gen::B(2)]);
        let via_product = act_matrix(st, &x).unwrap();
        let st_applied = act_matrix(s, &act_matrix(t, &x).unwrap()).unwrap();
        assert_eq!(via_product, st_applied);
        assert!(act_matrix([[1, 1], [1, 1]], &x).is_err());
    }

    #[test]
    fn minus_identity_scales_by_degree_parity() {
        let x = elem(2, &[Gen::A(1), Gen::B(1), Gen::D(1, 2)]);
        let y = act_matrix([[-1, 0], [0, -1]], &x).unwrap();
        assert_eq!(y, x);
        let z = elem(2, &[Gen::A(1), Gen::D(1, 2)]);
        let mz = act_matrix([[-1, 0], [0, -1]], &z).unwrap();
        assert_eq!(mz, z.scaled(&rat_i64(-1)));
    }

    #[test]
    fn permutation_action() {
        let d12 = elem(2, &[Gen::D(1, 2)]);
        let swapped = act_perm(&[1, 0], &d12).unwrap();
        assert_eq!(swapped, d12);
        let a1 = elem(2, &[Gen::A(1)]);
        let a2 = elem(2, &[Gen::A(2)]);
        assert_eq!(act_perm(&[1, 0], &a1).unwrap(), a2);
    }

    #[test]
    fn d_commutes_with_group_and_permutations() {
        let words: Vec<Vec<Gen>> = vec![
            vec![Gen::D(1, 2)],
            vec![Gen::D(1, 3), Gen::A(2)],
            vec![Gen::D(2, 3), Gen::D(1, 3)],
            vec![Gen::A(1), Gen::D(1, 2), Gen::B(3)],
        ];
        let s = [[0, -1], [1, 0]];
        for w in &words {
            let e = elem(3, w);
            let d_then_g = act_matrix(s, &differential(&e).unwrap()).unwrap();
            let g_then_d = differential(&act_matrix(s, &e).unwrap()).unwrap();
            assert_eq!(d_then_g, g_then_d, "d vs S on {w:?}");
            let sigma = vec![2usize, 0, 1];
            let d_then_p = act_perm(&sigma, &differential(&e).unwrap()).unwrap();
            let p_then_d = differential(&act_perm(&sigma, &e).unwrap()).unwrap();
            assert_eq!(d_then_p, p_then_d, "d vs sigma on {w:?}");
        }
    }

    #[test]
    fn basis_n1_and_n2_dimensions() {
        let t1 = basis_table(1);
        assert_eq!(t1.total_dim(), 4);
        let t2 = basis_table(2);
        assert_eq!(t2.total_dim(), 20);
        for n in 1..=6 {
            assert_eq!(dim_total(n), dim_closed_form(n), "n={n}");
            if n <= 4 {
                assert_eq!(basis_table(n).total_dim(), dim_closed_form(n));
            }
        }
    }

    #[test]
    fn block_basis_agrees_with_table() {
        let table = basis_table(3);
        for (b, monos) in &table.blocks {
            assert_eq!(&block_basis(3, *b), monos, "block {b:?}");
        }
        // empty block
        assert!(block_basis(3, GradedBlockIndex { p: 0, q: 0, h: 1 }).is_empty());
    }

    #[test]
    fn lambda_part_matches_brute_force_quotient() {
        // p = 0 blocks of the table vs the free exterior quotient by the
        // Arnold relations: coefficients of prod_{i=1}^{n-1} (1 + i t).
        for n in 2..=4usize {
            let model = FreeForestModel::new(n);
            let (alg, rels) = model.arrangement_relations();
            let dims = alg.quotient_dims(&rels);
            let table = basis_table(n);
            for q in 0..n {
                let got = table.block_dim(GradedBlockIndex { p: 0, q, h: 0 });
                assert_eq!(got, dims[q], "n={n} q={q}");
            }
            let mut poly = vec![1i64];
            for i in 1..n as i64 {
                let mut next = vec![0i64; poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d] += c;
                    next[d + 1] += c * i;
                }
                poly = next;
            }
            for (d, c) in poly.iter().enumerate() {
                assert_eq!(dims[d] as i64, *c, "n={n} deg={d}");
            }
        }
    }

    #[test]
    fn normalization_congruent_modulo_relations() {
        // normalize(w) - w lies in the relation ideal of the free model
        let model = FreeForestModel::new(3);
        let rels = model.relations();
        let to_ext = |g: Gen| -> ExtElement {
            match g {
                Gen::A(v) => model.a(v as usize),
                Gen::B(v) => model.b(v as usize),
                Gen::D(i, j) => model.delta(i as usize, j as usize),
            }
        };
        let words: Vec<Vec<Gen>> = vec![
            vec![Gen::D(1, 3), Gen::D(2, 3)],
            vec![Gen::A(2), Gen::D(1, 2)],
            vec![Gen::B(3), Gen::D(1, 3), Gen::A(2)],
            vec![Gen::D(2, 3), Gen::D(1, 2), Gen::A(3)],
            vec![Gen::A(1), Gen::B(2), Gen::D(2, 3)],
            vec![Gen::D(1, 2), Gen::D(1, 3), Gen::B(2)],
        ];
        for w in &words {
            let mut free = model.alg.one();
            for &g in w {
                free = model.alg.mul(&free, &to_ext(g));
            }
            let normalized = elem(3, w);
            let mut diff = free;
            for (m, c) in normalized.terms() {
                let mut term = model.alg.one();
                for g in m.word() {
                    term = model.alg.mul(&term, &to_ext(g));
                }
                model.alg.add_scaled(&mut diff, &term, &-c.clone());
            }
            assert!(
                model.alg.in_ideal(&rels, &diff),
                "normalize changed the class of {w:?}"
            );
        }
    }
}
