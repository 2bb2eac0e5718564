//! Cohomology of the forest algebra and its quotient.
//!
//! Everything is computed per (p, q, h) block: the differential preserves h
//! and the weight p + 2q and shifts (p, q) by (+2, -1), so cocycles,
//! coboundaries and the ideal quotient all decompose. H is the cohomology of
//! (A_n, d); B is its quotient by the ideal generated by the classes of
//! sum a_i and sum b_i. Multiplicities of the SL2-irreducible V_k are
//! computed by two independent routes (weight-space differences and kernels
//! of the induced raising operator) which must agree exactly.

use crate::arith::{rat_i64, Rat};
use crate::error::{Error, Result};
use crate::forest::{
    act_matrix, act_perm, act_sl2, basis_table, differential, sum_a, sum_b, AlgebraElement,
    BasisTable, GradedBlockIndex, Monomial, Sl2Gen,
};
use crate::linalg::{induced_map, SparseExactMatrix, SparseVec, Subquotient};
use crate::partitions::canonical_permutation;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Which graded object a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    /// Cohomology of (A_n, d).
    H,
    /// Quotient of H by the ideal of the classes of sum a_i, sum b_i.
    B,
}

/// Per-block subquotients for one n.
#[derive(Debug)]
pub struct Tables {
    pub n: usize,
    pub basis: Arc<BasisTable>,
    h_blocks: BTreeMap<GradedBlockIndex, Subquotient>,
    b_blocks: BTreeMap<GradedBlockIndex, Subquotient>,
}

/// Expand an element in the monomial basis of a single block.
fn expand_in_block(
    elem: &AlgebraElement,
    block: GradedBlockIndex,
    index: &HashMap<Monomial, usize>,
) -> Result<SparseVec> {
    let mut entries: Vec<(usize, Rat)> = Vec::new();
    for (m, c) in elem.terms() {
        if m.block() != block {
            return Err(Error::ShapeMismatch(format!(
                "term {m} lies outside block {block:?}"
            )));
        }
        let Some(&i) = index.get(m) else {
            return Err(Error::ShapeMismatch(format!("monomial {m} not in basis")));
        };
        entries.push((i, c.clone()));
    }
    entries.sort_by_key(|e| e.0);
    Ok(entries)
}

/// Matrix of a block-homogeneous operator between two blocks, columns
/// indexed by the source basis.
pub fn operator_matrix(
    table: &BasisTable,
    src: GradedBlockIndex,
    dst: GradedBlockIndex,
    op: impl Fn(&AlgebraElement) -> Result<AlgebraElement>,
) -> Result<SparseExactMatrix> {
    static EMPTY: OnceLock<HashMap<Monomial, usize>> = OnceLock::new();
    let dst_index = table
        .index
        .get(&dst)
        .unwrap_or_else(|| EMPTY.get_or_init(HashMap::new));
    let rows = table.block_dim(dst);
    let mut columns = Vec::with_capacity(table.block_dim(src));
    for m in table.block(src) {
        let mut e = AlgebraElement::zero(table.n);
        e.add_monomial(m.clone(), rat_i64(1));
        let image = op(&e)?;
        columns.push(expand_in_block(&image, dst, dst_index)?);
    }
    SparseExactMatrix::from_columns(rows, columns)
}

fn d_block(b: GradedBlockIndex) -> GradedBlockIndex {
    GradedBlockIndex {
        p: b.p + 2,
        q: b.q.wrapping_sub(1),
        h: b.h,
    }
}

fn build_h_block(table: &BasisTable, b: GradedBlockIndex) -> Result<Subquotient> {
    let dim = table.block_dim(b);
    // cocycles: kernel of d out of the block
    let cycles: Vec<SparseVec> = if b.q == 0 {
        (0..dim).map(|i| vec![(i, rat_i64(1))]).collect()
    } else {
        operator_matrix(table, b, d_block(b), differential)?.kernel_basis()
    };
    // coboundaries: image of d into the block
    let mut boundaries: Vec<SparseVec> = Vec::new();
    if b.p >= 2 {
        let src = GradedBlockIndex {
            p: b.p - 2,
            q: b.q + 1,
            h: b.h,
        };
        if table.block_dim(src) > 0 {
            let m = operator_matrix(table, src, b, differential)?;
            boundaries.extend(m.columns().iter().filter(|c| !c.is_empty()).cloned());
        }
    }
    Subquotient::from_spans(dim, &cycles, &boundaries)
}

fn build_b_block(
    table: &BasisTable,
    h_blocks: &BTreeMap<GradedBlockIndex, Subquotient>,
    b: GradedBlockIndex,
) -> Result<Subquotient> {
    let Some(h) = h_blocks.get(&b) else {
        return Subquotient::from_spans(table.block_dim(b), &[], &[]);
    };
    let mut boundaries: Vec<SparseVec> = h.boundary_basis.clone();
    // ideal component: (sum a) * Z(p-1, q, h-1) + (sum b) * Z(p-1, q, h+1)
    if b.p >= 1 {
        let n = table.n;
        for (gen_elem, dh) in [(sum_a(n), 1i64), (sum_b(n), -1i64)] {
            let src = GradedBlockIndex {
                p: b.p - 1,
                q: b.q,
                h: b.h - dh,
            };
            let Some(src_sub) = h_blocks.get(&src) else {
                continue;
            };
            let src_basis = table.block(src);
            let dst_index = &table.index[&b];
            for z in &src_sub.cycle_basis {
                let mut elem = AlgebraElement::zero(n);
                for (i, c) in z {
                    let mut t = AlgebraElement::zero(n);
                    t.add_monomial(src_basis[*i].clone(), c.clone());
                    elem.add_assign(&t);
                }
                let prod = gen_elem.mul(&elem)?;
                if !prod.is_zero() {
                    boundaries.push(expand_in_block(&prod, b, dst_index)?);
                }
            }
        }
    }
    Subquotient::from_spans(table.block_dim(b), &h.cycle_basis, &boundaries)
}

fn build_tables(n: usize) -> Result<Tables> {
    let basis = basis_table(n);
    let block_ids: Vec<GradedBlockIndex> = basis.blocks.keys().cloned().collect();
    let h_pairs: Vec<(GradedBlockIndex, Subquotient)> = block_ids
        .par_iter()
        .map(|&b| build_h_block(&basis, b).map(|s| (b, s)))
        .collect::<Result<Vec<_>>>()?;
    let h_blocks: BTreeMap<_, _> = h_pairs.into_iter().collect();
    let b_pairs: Vec<(GradedBlockIndex, Subquotient)> = block_ids
        .par_iter()
        .map(|&b| build_b_block(&basis, &h_blocks, b).map(|s| (b, s)))
        .collect::<Result<Vec<_>>>()?;
    let b_blocks: BTreeMap<_, _> = b_pairs.into_iter().collect();
    Ok(Tables {
        n,
        basis,
        h_blocks,
        b_blocks,
    })
}

/// Memoized per-n tables of block subquotients.
pub fn tables(n: usize) -> Result<Arc<Tables>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_tables(n)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| t.clone())
        .clone())
}

impl Tables {
    fn space_blocks(&self, space: Space) -> &BTreeMap<GradedBlockIndex, Subquotient> {
        match space {
            Space::H => &self.h_blocks,
            Space::B => &self.b_blocks,
        }
    }

    pub fn subquotient(&self, space: Space, b: GradedBlockIndex) -> Option<&Subquotient> {
        self.space_blocks(space).get(&b)
    }

    pub fn dim(&self, space: Space, b: GradedBlockIndex) -> usize {
        self.subquotient(space, b).map_or(0, |s| s.dim())
    }

    pub fn blocks(&self) -> impl Iterator<Item = GradedBlockIndex> + '_ {
        self.h_blocks.keys().cloned()
    }

    /// Dimensions summed by cohomological degree.
    pub fn poincare(&self, space: Space) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, s) in self.space_blocks(space) {
            let d = b.degree();
            if out.len() <= d {
                out.resize(d + 1, 0);
            }
            out[d] += s.dim();
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    /// Induced matrix of a block-preserving operator on a cohomology block.
    pub fn induced(
        &self,
        space: Space,
        src: GradedBlockIndex,
        dst: GradedBlockIndex,
        op: impl Fn(&AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<SparseExactMatrix> {
        let blocks = self.space_blocks(space);
        let (Some(s), Some(d)) = (blocks.get(&src), blocks.get(&dst)) else {
            return SparseExactMatrix::from_columns(0, Vec::new());
        };
        let ambient = operator_matrix(&self.basis, src, dst, op)?;
        induced_map(&ambient, s, d)
    }

    /// Trace of a permutation of the given cycle type on one block.
    pub fn sn_trace(
        &self,
        cycle_type: &[usize],
        space: Space,
        b: GradedBlockIndex,
    ) -> Result<Rat> {
        if cycle_type.iter().sum::<usize>() != self.n {
            return Err(Error::invalid("cycle type does not sum to n"));
        }
        if self.dim(space, b) == 0 {
            return Ok(Rat::zero());
        }
        let perm = canonical_permutation(cycle_type);
        let m = self.induced(space, b, b, |e| act_perm(&perm, e))?;
        m.trace()
    }

    /// Multiplicity of V_k in the (p, q) part, by weight-space differences,
    /// cross-checked against the kernel of the induced raising operator.
    pub fn multiplicities(&self, space: Space) -> Result<MultiplicityTable> {
        let blocks = self.space_blocks(space);
        let keys: Vec<(usize, usize)> = {
            let mut s: Vec<(usize, usize)> = blocks.keys().map(|b| (b.p, b.q)).collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let entries: Vec<((usize, usize, usize), usize)> = keys
            .par_iter()
            .flat_map(|&(p, q)| {
                let mut out: Vec<Result<((usize, usize, usize), usize)>> = Vec::new();
                for k in 0..=p {
                    let at =
                        |h: i64| -> usize { self.dim(space, GradedBlockIndex { p, q, h }) };
                    let d_k = at(k as i64);
                    let d_k2 = at(k as i64 + 2);
                    if d_k < d_k2 {
                        out.push(Err(Error::MultiplicityMismatch(format!(
                            "space {space:?} block p={p} q={q}: weight space {k} is \
                             smaller than weight space {}",
                            k + 2
                        ))));
                        continue;
                    }
                    let by_weights = d_k - d_k2;
                    if d_k == 0 {
                        continue;
                    }
                    match self.raising_kernel_dim(space, p, q, k as i64) {
                        Ok(by_kernel) if by_kernel == by_weights => {
                            if by_weights > 0 {
                                out.push(Ok(((p, q, k), by_weights)));
                            }
                        }
                        Ok(by_kernel) => out.push(Err(Error::MultiplicityMismatch(format!(
                            "space {space:?} block p={p} q={q} k={k}: weights give \
                             {by_weights}, ker X gives {by_kernel}"
                        )))),
                        Err(e) => out.push(Err(e)),
                    }
                }
                out
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = BTreeMap::new();
        for (key, v) in entries {
            m.insert(key, v);
        }
        let table = MultiplicityTable { n: self.n, m };
        table.check_sums(self, space)?;
        Ok(table)
    }

    fn raising_kernel_dim(&self, space: Space, p: usize, q: usize, h: i64) -> Result<usize> {
        let src = GradedBlockIndex { p, q, h };
        let dst = GradedBlockIndex { p, q, h: h + 2 };
        let dim_src = self.dim(space, src);
        if dim_src == 0 {
            return Ok(0);
        }
        let x = self.induced(space, src, dst, |e| act_sl2(Sl2Gen::X, e))?;
        Ok(dim_src - x.rank())
    }

    /// Trace of a permutation on the multiplicity space of V_k in (p, q):
    /// the difference of its traces on the h = k and h = k + 2 blocks.
    pub fn multiplicity_trace(
        &self,
        space: Space,
        cycle_type: &[usize],
        p: usize,
        q: usize,
        k: usize,
    ) -> Result<Rat> {
        let t1 = self.sn_trace(cycle_type, space, GradedBlockIndex { p, q, h: k as i64 })?;
        let t2 = self.sn_trace(
            cycle_type,
            space,
            GradedBlockIndex {
                p,
                q,
                h: k as i64 + 2,
            },
        )?;
        Ok(t1 - t2)
    }

    /// The (p, q) part as a single subquotient over all h, blocks ordered by
    /// increasing h; needed for operators that mix weights.
    pub fn combined_block(&self, space: Space, p: usize, q: usize) -> CombinedBlock {
        let blocks = self.space_blocks(space);
        let mut parts: Vec<(GradedBlockIndex, usize)> = Vec::new();
        let mut offset = 0usize;
        for (b, _) in blocks.range(
            GradedBlockIndex {
                p,
                q,
                h: i64::MIN,
            }..=GradedBlockIndex { p, q, h: i64::MAX },
        ) {
            parts.push((*b, offset));
            offset += self.basis.block_dim(*b);
        }
        let mut cycles = Vec::new();
        let mut boundaries = Vec::new();
        for (b, off) in &parts {
            let s = &blocks[b];
            for v in &s.cycle_basis {
                cycles.push(shift_vec(v, *off));
            }
            for v in &s.boundary_basis {
                boundaries.push(shift_vec(v, *off));
            }
        }
        let subq = Subquotient::from_spans(offset, &cycles, &boundaries)
            .expect("blockwise data is consistent");
        CombinedBlock {
            p,
            q,
            parts,
            ambient: offset,
            subq,
        }
    }

    /// Induced matrix of an SL2(Z) element on the combined (p, q) part.
    pub fn group_matrix(
        &self,
        space: Space,
        g: [[i64; 2]; 2],
        p: usize,
        q: usize,
    ) -> Result<SparseExactMatrix> {
        let combined = self.combined_block(space, p, q);
        let ambient = combined.ambient_matrix(self, |e| act_matrix(g, e))?;
        induced_map(&ambient, &combined.subq, &combined.subq)
    }
}

fn shift_vec(v: &SparseVec, off: usize) -> SparseVec {
    v.iter().map(|(i, c)| (i + off, c.clone())).collect()
}

/// A (p, q) part assembled from its h-blocks.
pub struct CombinedBlock {
    pub p: usize,
    pub q: usize,
    pub parts: Vec<(GradedBlockIndex, usize)>,
    pub ambient: usize,
    pub subq: Subquotient,
}

impl CombinedBlock {
    /// Ambient matrix of an operator that preserves (p, q) but may mix h.
    pub fn ambient_matrix(
        &self,
        tables: &Tables,
        op: impl Fn(&AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<SparseExactMatrix> {
        let index: BTreeMap<GradedBlockIndex, usize> = self.parts.iter().cloned().collect();
        let mut columns = Vec::with_capacity(self.ambient);
        for (b, _) in &self.parts {
            for m in tables.basis.block(*b) {
                let mut e = AlgebraElement::zero(tables.n);
                e.add_monomial(m.clone(), rat_i64(1));
                let image = op(&e)?;
                let mut entries: Vec<(usize, Rat)> = Vec::new();
                for (t, c) in image.terms() {
                    let tb = t.block();
                    let Some(off) = index.get(&tb) else {
                        return Err(Error::ShapeMismatch(format!(
                            "image term {t} leaves the (p, q) part"
                        )));
                    };
                    let pos = tables.basis.index[&tb][t];
                    entries.push((off + pos, c.clone()));
                }
                entries.sort_by_key(|e| e.0);
                columns.push(entries);
            }
        }
        SparseExactMatrix::from_columns(self.ambient, columns)
    }
}

/// Dimension tables computed purely from matrix ranks, without materializing
/// kernel bases. This is the scalable path: dim H(b) needs the ranks of the
/// differentials in and out of b, and the ideal quotient and raising-kernel
/// dimensions reduce to ranks of stacked matrices via
/// dim A(ker B) = rank([A; B]) - rank(B).
pub struct DimTables {
    pub n: usize,
    basis: Arc<BasisTable>,
    d_rank: BTreeMap<GradedBlockIndex, usize>,
    h: BTreeMap<GradedBlockIndex, usize>,
    b: BTreeMap<GradedBlockIndex, usize>,
}

fn build_dim_tables(n: usize) -> Result<DimTables> {
    let basis = basis_table(n);
    let block_ids: Vec<GradedBlockIndex> = basis.blocks.keys().cloned().collect();
    let d_rank: BTreeMap<GradedBlockIndex, usize> = block_ids
        .par_iter()
        .map(|&bk| {
            if bk.q == 0 {
                return Ok((bk, 0));
            }
            let m = operator_matrix(&basis, bk, d_block(bk), differential)?;
            Ok((bk, m.rank()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let rank_out = |bk: GradedBlockIndex| d_rank.get(&bk).copied().unwrap_or(0);
    let rank_in = |bk: GradedBlockIndex| {
        if bk.p >= 2 {
            rank_out(GradedBlockIndex {
                p: bk.p - 2,
                q: bk.q + 1,
                h: bk.h,
            })
        } else {
            0
        }
    };
    let mut h: BTreeMap<GradedBlockIndex, usize> = BTreeMap::new();
    for &bk in &block_ids {
        let dim = basis.block_dim(bk);
        let hd = dim
            .checked_sub(rank_out(bk) + rank_in(bk))
            .ok_or_else(|| Error::BrokenComplex(format!("negative H dimension at {bk:?}")))?;
        if hd > 0 {
            h.insert(bk, hd);
        }
    }
    // route (ii): peel the four-dimensional curve factor off blockwise,
    // by induction on p
    let mut b_div: BTreeMap<GradedBlockIndex, usize> = BTreeMap::new();
    for &bk in &block_ids {
        let at = |p: i64, dh: i64| -> usize {
            if p < 0 {
                return 0;
            }
            b_div
                .get(&GradedBlockIndex {
                    p: p as usize,
                    q: bk.q,
                    h: bk.h + dh,
                })
                .copied()
                .unwrap_or(0)
        };
        let p = bk.p as i64;
        let consumed = at(p - 1, -1) + at(p - 1, 1) + at(p - 2, 0);
        let hd = h.get(&bk).copied().unwrap_or(0);
        let bd = hd.checked_sub(consumed).ok_or_else(|| {
            Error::MultiplicityMismatch(format!(
                "division route gives a negative dimension at {bk:?}"
            ))
        })?;
        if bd > 0 {
            b_div.insert(bk, bd);
        }
    }
    // the division must also balance on blocks with no ambient basis at all
    {
        let mut targets: std::collections::BTreeSet<GradedBlockIndex> =
            h.keys().cloned().collect();
        for bk in b_div.keys() {
            for (dp, dh) in [(1i64, -1i64), (1, 1), (2, 0)] {
                targets.insert(GradedBlockIndex {
                    p: bk.p + dp as usize,
                    q: bk.q,
                    h: bk.h + dh,
                });
            }
        }
        for bk in targets {
            let at = |p: i64, dh: i64| -> usize {
                if p < 0 {
                    return 0;
                }
                b_div
                    .get(&GradedBlockIndex {
                        p: p as usize,
                        q: bk.q,
                        h: bk.h + dh,
                    })
                    .copied()
                    .unwrap_or(0)
            };
            let p = bk.p as i64;
            let total = at(p, 0) + at(p - 1, -1) + at(p - 1, 1) + at(p - 2, 0);
            if total != h.get(&bk).copied().unwrap_or(0) {
                return Err(Error::MultiplicityMismatch(format!(
                    "division route does not multiply back at {bk:?}"
                )));
            }
        }
    }
    // route (i): explicit quotient by the ideal of [sum a], [sum b]:
    // dim I(b) = dim(Sa Z1 + Sb Z2 + B(b)) with the stacked-rank identity
    let sa = sum_a(n);
    let sb = sum_b(n);
    let ideal_pairs: Vec<(GradedBlockIndex, usize)> = block_ids
        .par_iter()
        .filter(|bk| h.contains_key(bk))
        .map(|&bk| {
            if bk.p == 0 {
                return Ok((bk, 0));
            }
            let mut col_groups: Vec<GradedBlockIndex> = Vec::new();
            let mut ops: Vec<(&AlgebraElement, GradedBlockIndex)> = Vec::new();
            for (gen, dh) in [(&sa, 1i64), (&sb, -1i64)] {
                let src = GradedBlockIndex {
                    p: bk.p - 1,
                    q: bk.q,
                    h: bk.h - dh,
                };
                if basis.block_dim(src) > 0 {
                    col_groups.push(src);
                    ops.push((gen, src));
                }
            }
            let n_mul = col_groups.len();
            let bminus = GradedBlockIndex {
                p: bk.p.wrapping_sub(2),
                q: bk.q + 1,
                h: bk.h,
            };
            let has_bminus = bk.p >= 2 && basis.block_dim(bminus) > 0;
            if has_bminus {
                col_groups.push(bminus);
            }
            if col_groups.is_empty() {
                return Ok((bk, 0));
            }
            let col_dims: Vec<usize> =
                col_groups.iter().map(|&g| basis.block_dim(g)).collect();
            let mut row_dims: Vec<usize> = vec![basis.block_dim(bk)];
            let mut parts: Vec<(usize, usize, SparseExactMatrix)> = Vec::new();
            let mut constraint_rank = 0usize;
            for (gi, (gen, src)) in ops.iter().enumerate() {
                parts.push((0, gi, operator_matrix(&basis, *src, bk, |e| gen.mul(e))?));
                if src.q > 0 {
                    let tgt = d_block(*src);
                    row_dims.push(basis.block_dim(tgt));
                    parts.push((
                        row_dims.len() - 1,
                        gi,
                        operator_matrix(&basis, *src, tgt, differential)?,
                    ));
                    constraint_rank += rank_out(*src);
                }
            }
            if has_bminus {
                parts.push((
                    0,
                    n_mul,
                    operator_matrix(&basis, bminus, bk, differential)?,
                ));
            }
            let part_refs: Vec<(usize, usize, &SparseExactMatrix)> =
                parts.iter().map(|(i, j, m)| (*i, *j, m)).collect();
            let k = SparseExactMatrix::from_blocks(&row_dims, &col_dims, &part_refs)?;
            let big = k.rank();
            // rank(K) - constraint ranks = dim(Sa Z1 + Sb Z2 + B(b)); dropping
            // dim B(b) leaves the ideal component inside cohomology
            let span = big.checked_sub(constraint_rank).ok_or_else(|| {
                Error::BrokenComplex(format!("ideal rank bookkeeping failed at {bk:?}"))
            })?;
            let ideal = span.checked_sub(rank_in(bk)).ok_or_else(|| {
                Error::BrokenComplex(format!("ideal span smaller than boundaries at {bk:?}"))
            })?;
            Ok((bk, ideal))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b_quot: BTreeMap<GradedBlockIndex, usize> = BTreeMap::new();
    for (bk, ideal) in ideal_pairs {
        let hd = h.get(&bk).copied().unwrap_or(0);
        let bd = hd.checked_sub(ideal).ok_or_else(|| {
            Error::MultiplicityMismatch(format!("ideal exceeds cohomology at {bk:?}"))
        })?;
        if bd > 0 {
            b_quot.insert(bk, bd);
        }
    }
    if b_quot != b_div {
        return Err(Error::MultiplicityMismatch(format!(
            "quotient and division routes disagree for n = {n}: {b_quot:?} vs {b_div:?}"
        )));
    }
    Ok(DimTables {
        n,
        basis,
        d_rank,
        h,
        b: b_quot,
    })
}

/// Memoized rank-based dimension tables.
pub fn dim_tables(n: usize) -> Result<Arc<DimTables>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DimTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_dim_tables(n)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| t.clone())
        .clone())
}

impl DimTables {
    fn rank_out(&self, bk: GradedBlockIndex) -> usize {
        self.d_rank.get(&bk).copied().unwrap_or(0)
    }

    fn rank_in(&self, bk: GradedBlockIndex) -> usize {
        if bk.p >= 2 {
            self.rank_out(GradedBlockIndex {
                p: bk.p - 2,
                q: bk.q + 1,
                h: bk.h,
            })
        } else {
            0
        }
    }

    pub fn dim(&self, space: Space, bk: GradedBlockIndex) -> usize {
        match space {
            Space::H => self.h.get(&bk).copied().unwrap_or(0),
            Space::B => self.b.get(&bk).copied().unwrap_or(0),
        }
    }

    pub fn blocks(&self, space: Space) -> impl Iterator<Item = (GradedBlockIndex, usize)> + '_ {
        let m = match space {
            Space::H => &self.h,
            Space::B => &self.b,
        };
        m.iter().map(|(k, v)| (*k, *v))
    }

    pub fn poincare(&self, space: Space) -> Vec<usize> {
        let mut out = Vec::new();
        for (bk, d) in self.blocks(space) {
            let deg = bk.degree();
            if out.len() <= deg {
                out.resize(deg + 1, 0);
            }
            out[deg] += d;
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    /// Multiplicities by weight-space differences, verified against the
    /// kernel of the induced raising operator computed via stacked ranks.
    pub fn multiplicities(&self, space: Space) -> Result<MultiplicityTable> {
        let mut pq: Vec<(usize, usize)> = self
            .blocks(space)
            .map(|(bk, _)| (bk.p, bk.q))
            .collect();
        pq.sort_unstable();
        pq.dedup();
        let entries: Vec<((usize, usize, usize), usize)> = pq
            .par_iter()
            .flat_map(|&(p, q)| {
                let mut out: Vec<Result<((usize, usize, usize), usize)>> = Vec::new();
                for k in 0..=p {
                    let at = |h: i64| self.dim(space, GradedBlockIndex { p, q, h });
                    let d_k = at(k as i64);
                    let d_k2 = at(k as i64 + 2);
                    if d_k < d_k2 {
                        out.push(Err(Error::MultiplicityMismatch(format!(
                            "space {space:?} block p={p} q={q}: weight space {k} is \
                             smaller than weight space {}",
                            k + 2
                        ))));
                        continue;
                    }
                    let by_weights = d_k - d_k2;
                    if d_k == 0 {
                        continue;
                    }
                    match self.raising_kernel_dim(space, p, q, k as i64) {
                        Ok(by_kernel) if by_kernel == by_weights => {
                            if by_weights > 0 {
                                out.push(Ok(((p, q, k), by_weights)));
                            }
                        }
                        Ok(by_kernel) => out.push(Err(Error::MultiplicityMismatch(format!(
                            "space {space:?} block p={p} q={q} k={k}: weights give \
                             {by_weights}, ker X gives {by_kernel}"
                        )))),
                        Err(e) => out.push(Err(e)),
                    }
                }
                out
            })
            .collect::<Result<Vec<_>>>()?;
        let table = MultiplicityTable {
            n: self.n,
            m: entries.into_iter().collect(),
        };
        let mut by_pq: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&(p, q, k), &v) in &table.m {
            *by_pq.entry((p, q)).or_default() += v * (k + 1);
        }
        let mut dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (bk, d) in self.blocks(space) {
            *dims.entry((bk.p, bk.q)).or_default() += d;
        }
        if by_pq != dims {
            return Err(Error::MultiplicityMismatch(format!(
                "complete-reducibility sum failed for {space:?}: {by_pq:?} vs {dims:?}"
            )));
        }
        Ok(table)
    }

    /// dim ker of the induced raising operator on the (p, q, h) block of the
    /// given space, via rank([op; constraints]) identities.
    fn raising_kernel_dim(&self, space: Space, p: usize, q: usize, h: i64) -> Result<usize> {
        let src = GradedBlockIndex { p, q, h };
        let dst = GradedBlockIndex { p, q, h: h + 2 };
        let dim_src = self.dim(space, src);
        if dim_src == 0 {
            return Ok(0);
        }
        let n = self.n;
        let basis = &self.basis;
        // column groups: C(src), then spanning sources of W(dst)
        let mut col_groups: Vec<usize> = vec![basis.block_dim(src)];
        let mut row_dims: Vec<usize> = vec![basis.block_dim(dst)];
        let mut parts: Vec<(usize, usize, SparseExactMatrix)> = Vec::new();
        let mut constraint_rank = 0usize;
        // X on C(src), with the cocycle constraint d|src
        parts.push((
            0,
            0,
            operator_matrix(basis, src, dst, |e| act_sl2(Sl2Gen::X, e))?,
        ));
        if src.q > 0 {
            let tgt = d_block(src);
            row_dims.push(basis.block_dim(tgt));
            parts.push((
                row_dims.len() - 1,
                0,
                operator_matrix(basis, src, tgt, differential)?,
            ));
            constraint_rank += self.rank_out(src);
        }
        // boundaries into dst
        if dst.p >= 2 {
            let bminus = GradedBlockIndex {
                p: dst.p - 2,
                q: dst.q + 1,
                h: dst.h,
            };
            if basis.block_dim(bminus) > 0 {
                col_groups.push(basis.block_dim(bminus));
                parts.push((
                    0,
                    col_groups.len() - 1,
                    operator_matrix(basis, bminus, dst, differential)?,
                ));
            }
        }
        // ideal generators into dst, for the quotient space only
        if space == Space::B && dst.p >= 1 {
            let sa = sum_a(n);
            let sb = sum_b(n);
            for (gen, dh) in [(&sa, 1i64), (&sb, -1i64)] {
                let gsrc = GradedBlockIndex {
                    p: dst.p - 1,
                    q: dst.q,
                    h: dst.h - dh,
                };
                if basis.block_dim(gsrc) == 0 {
                    continue;
                }
                col_groups.push(basis.block_dim(gsrc));
                let gi = col_groups.len() - 1;
                parts.push((0, gi, operator_matrix(basis, gsrc, dst, |e| gen.mul(e))?));
                if gsrc.q > 0 {
                    let tgt = d_block(gsrc);
                    row_dims.push(basis.block_dim(tgt));
                    parts.push((
                        row_dims.len() - 1,
                        gi,
                        operator_matrix(basis, gsrc, tgt, differential)?,
                    ));
                    constraint_rank += self.rank_out(gsrc);
                }
            }
        }
        let part_refs: Vec<(usize, usize, &SparseExactMatrix)> =
            parts.iter().map(|(i, j, m)| (*i, *j, m)).collect();
        let kmat = SparseExactMatrix::from_blocks(&row_dims, &col_groups, &part_refs)?;
        let big = kmat.rank();
        let image_plus_w = big.checked_sub(constraint_rank).ok_or_else(|| {
            Error::BrokenComplex(format!("raising rank bookkeeping failed at {src:?}"))
        })?;
        // dim W(dst): boundaries for H, boundaries + ideal for B
        let z_dst = basis.block_dim(dst) - self.rank_out(dst);
        let w_dst = match space {
            Space::H => self.rank_in(dst),
            Space::B => z_dst - self.dim(Space::B, dst),
        };
        let rank_induced = image_plus_w.checked_sub(w_dst).ok_or_else(|| {
            Error::BrokenComplex(format!("raising image misses W at {src:?}"))
        })?;
        dim_src.checked_sub(rank_induced).ok_or_else(|| {
            Error::BrokenComplex(format!("raising rank exceeds source at {src:?}"))
        })
    }
}

/// Multiplicities of V_k per (p, q): map (p, q, k) -> count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityTable {
    pub n: usize,
    pub m: BTreeMap<(usize, usize, usize), usize>,
}

impl MultiplicityTable {
    pub fn get(&self, p: usize, q: usize, k: usize) -> usize {
        self.m.get(&(p, q, k)).copied().unwrap_or(0)
    }

    /// Multiplicity of V_k in the full degree-d part.
    pub fn by_degree(&self, d: usize, k: usize) -> usize {
        self.m
            .iter()
            .filter(|(&(p, q, kk), _)| p + q == d && kk == k)
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn max_k(&self) -> usize {
        self.m.keys().map(|&(_, _, k)| k).max().unwrap_or(0)
    }

    /// Sum over k of mult * (k+1) must reproduce the block dimensions.
    fn check_sums(&self, tables: &Tables, space: Space) -> Result<()> {
        let mut by_pq: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&(p, q, k), &v) in &self.m {
            *by_pq.entry((p, q)).or_default() += v * (k + 1);
        }
        let mut dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for b in tables.blocks().collect::<Vec<_>>() {
            let d = tables.dim(space, b);
            if d > 0 {
                *dims.entry((b.p, b.q)).or_default() += d;
            }
        }
        if by_pq != dims {
            return Err(Error::MultiplicityMismatch(format!(
                "complete-reducibility sum failed for {space:?}: {by_pq:?} vs {dims:?}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::dense_rank;

    #[test]
    fn n1_dimensions() {
        let t = tables(1).unwrap();
        assert_eq!(t.poincare(Space::H), vec![1, 2, 1]);
        assert_eq!(t.poincare(Space::B), vec![1]);
    }

    #[test]
    fn n2_poincare_polynomials() {
        let t = tables(2).unwrap();
        assert_eq!(t.poincare(Space::H), vec![1, 4, 5, 2]);
        assert_eq!(t.poincare(Space::B), vec![1, 2]);
    }

    #[test]
    fn euler_characteristic_is_d_invariant() {
        for n in 1..=4usize {
            let t = tables(n).unwrap();
            let mut chi_a = 0i64;
            for (b, monos) in &t.basis.blocks {
                chi_a += if b.degree() % 2 == 0 { 1 } else { -1 } * monos.len() as i64;
            }
            let chi_h: i64 = t
                .poincare(Space::H)
                .iter()
                .enumerate()
                .map(|(d, &v)| if d % 2 == 0 { v as i64 } else { -(v as i64) })
                .sum();
            assert_eq!(chi_a, chi_h, "n={n}");
        }
    }

    #[test]
    fn h3_matches_dense_degreewise_computation() {
        // Independent path: whole-degree dense matrices of d, ranks by
        // fraction-free elimination, no block splitting.
        let t = tables(3).unwrap();
        let basis = &t.basis;
        let mut by_degree: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
        for monos in basis.blocks.values() {
            for m in monos {
                by_degree.entry(m.degree()).or_default().push(m.clone());
            }
        }
        let top = *by_degree.keys().max().unwrap();
        let mut ranks: BTreeMap<usize, usize> = BTreeMap::new();
        for d in 0..=top {
            let src = by_degree.get(&d).cloned().unwrap_or_default();
            let dst = by_degree.get(&(d + 1)).cloned().unwrap_or_default();
            if src.is_empty() || dst.is_empty() {
                ranks.insert(d, 0);
                continue;
            }
            let dst_index: HashMap<&Monomial, usize> =
                dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows = Vec::new();
            for m in &src {
                let mut e = AlgebraElement::zero(3);
                e.add_monomial(m.clone(), rat_i64(1));
                let im = differential(&e).unwrap();
                let mut dense = vec![Rat::zero(); dst.len()];
                for (t2, c) in im.terms() {
                    dense[dst_index[t2]] = c.clone();
                }
                rows.push(dense);
            }
            ranks.insert(d, dense_rank(&rows));
        }
        let poincare = t.poincare(Space::H);
        for d in 0..=top {
            let dim_d = by_degree.get(&d).map_or(0, |v| v.len());
            let expect = dim_d - ranks[&d] - if d > 0 { ranks[&(d - 1)] } else { 0 };
            let got = poincare.get(d).copied().unwrap_or(0);
            assert_eq!(got, expect, "degree {d}");
        }
    }

    #[test]
    fn splitting_identity_blockwise() {
        // dim H(p,q,h) = dim B(p,q,h) + dim B(p-1,q,h-1) + dim B(p-1,q,h+1)
        //              + dim B(p-2,q,h)
        for n in 1..=4usize {
            let t = tables(n).unwrap();
            for b in t.blocks().collect::<Vec<_>>() {
                let lhs = t.dim(Space::H, b);
                let at = |p: i64, h: i64| -> usize {
                    if p < 0 {
                        0
                    } else {
                        t.dim(
                            Space::B,
                            GradedBlockIndex {
                                p: p as usize,
                                q: b.q,
                                h,
                            },
                        )
                    }
                };
                let p = b.p as i64;
                let rhs = at(p, b.h)
                    + at(p - 1, b.h - 1)
                    + at(p - 1, b.h + 1)
                    + at(p - 2, b.h);
                assert_eq!(lhs, rhs, "n={n} block {b:?}");
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let t1 = tables(1).unwrap();
        let m1 = t1.multiplicities(Space::H).unwrap();
        assert_eq!(m1.get(1, 0, 1), 1); // degree 1 of H_1 is one V_1
        assert_eq!(m1.get(0, 0, 0), 1);
        assert_eq!(m1.get(2, 0, 0), 1); // top class a1 b1 is invariant

        let t2 = tables(2).unwrap();
        let mb = t2.multiplicities(Space::B).unwrap();
        assert_eq!(mb.by_degree(1, 1), 1); // B_2 degree 1 = V_1
        assert_eq!(mb.by_degree(0, 0), 1);
        assert_eq!(mb.by_degree(1, 0), 0);
    }

    #[test]
    fn sn_traces_on_n2() {
        let t = tables(2).unwrap();
        // identity class gives dimensions
        for b in t.blocks().collect::<Vec<_>>() {
            let tr = t.sn_trace(&[1, 1], Space::H, b).unwrap();
            assert_eq!(tr, rat_i64(t.dim(Space::H, b) as i64));
        }
        // transposition on B_2 degree 1: a_i and b_i are swapped and negated
        let mut total = Rat::zero();
        for h in [-1i64, 1] {
            total += t
                .sn_trace(&[2], Space::B, GradedBlockIndex { p: 1, q: 0, h })
                .unwrap();
        }
        total += t
            .sn_trace(&[2], Space::B, GradedBlockIndex { p: 0, q: 1, h: 0 })
            .unwrap();
        assert_eq!(total, rat_i64(-2));
    }

    #[test]
    fn lefschetz_alternating_trace_n3() {
        // alternating trace over cohomology equals alternating trace over
        // the algebra itself, for each conjugacy class
        let t = tables(3).unwrap();
        for sigma in [vec![1usize, 1, 1], vec![2, 1], vec![3]] {
            let perm = canonical_permutation(&sigma);
            let mut chi_alg = Rat::zero();
            for monos in t.basis.blocks.values() {
                for m in monos {
                    let mut e = AlgebraElement::zero(3);
                    e.add_monomial(m.clone(), rat_i64(1));
                    let im = act_perm(&perm, &e).unwrap();
                    let c = im.coeff(m);
                    let s = if m.degree() % 2 == 0 { c } else { -c };
                    chi_alg += s;
                }
            }
            let mut chi_h = Rat::zero();
            for b in t.blocks().collect::<Vec<_>>() {
                let tr = t.sn_trace(&sigma, Space::H, b).unwrap();
                chi_h += if b.degree() % 2 == 0 { tr } else { -tr };
            }
            assert_eq!(chi_alg, chi_h, "class {sigma:?}");
        }
    }

    #[test]
    fn group_matrices_on_b2_degree_one() {
        let t = tables(2).unwrap();
        let s = [[0i64, -1], [1, 0]];
        let m = t.group_matrix(Space::B, s, 1, 0).unwrap();
        assert_eq!(m.rows, 2);
        assert_eq!(m.trace().unwrap(), Rat::zero());
        assert!(m.pow(4).unwrap().is_identity());
        let id = t.group_matrix(Space::B, [[1, 0], [0, 1]], 1, 0).unwrap();
        assert!(id.is_identity());
        let neg = t.group_matrix(Space::B, [[-1, 0], [0, -1]], 1, 0).unwrap();
        assert_eq!(m.pow(2).unwrap(), neg);
    }

    #[test]
    fn dim_tables_agree_with_exact_subquotients() {
        for n in 1..=4usize {
            let exact = tables(n).unwrap();
            let fast = dim_tables(n).unwrap();
            for b in exact.blocks().collect::<Vec<_>>() {
                assert_eq!(fast.dim(Space::H, b), exact.dim(Space::H, b), "H n={n} {b:?}");
                assert_eq!(fast.dim(Space::B, b), exact.dim(Space::B, b), "B n={n} {b:?}");
            }
            for space in [Space::H, Space::B] {
                let me = fast.multiplicities(space).unwrap();
                let ms = exact.multiplicities(space).unwrap();
                assert_eq!(me, ms, "multiplicities n={n} {space:?}");
            }
        }
    }

    #[test]
    fn equivariant_multiplicity_traces_are_integral() {
        let t = tables(3).unwrap();
        let mults = t.multiplicities(Space::B).unwrap();
        for &(p, q, k) in mults.m.keys() {
            for sigma in [vec![1usize, 1, 1], vec![2, 1], vec![3]] {
                let tr = t.multiplicity_trace(Space::B, &sigma, p, q, k).unwrap();
                assert!(tr.is_integer(), "trace {tr} at ({p},{q},{k}) {sigma:?}");
            }
        }
    }
}
