//! Exact sparse linear algebra over the rationals.
//!
//! Matrices are stored column-major; a column is a sorted sparse vector of
//! (row index, value) pairs. Rank and kernels are computed by exact
//! elimination with a Markowitz-style pivot choice (sparsest column, then
//! least-filled row, ties broken by index) so results are deterministic.
//! Ranks can additionally be verified modulo fixed 62-bit primes.

use crate::arith::{inv_mod, mul_mod, rat_mod, Rat, MOD_P1, MOD_P2};
use crate::error::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Sorted sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec = Vec<(usize, Rat)>;

pub mod vecops {
    use super::*;

    pub fn from_dense(v: &[Rat]) -> SparseVec {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect()
    }

    pub fn unit(i: usize) -> SparseVec {
        vec![(i, Rat::one())]
    }

    pub fn scale(v: &mut SparseVec, c: &Rat) {
        if c.is_zero() {
            v.clear();
            return;
        }
        for (_, x) in v.iter_mut() {
            *x *= c;
        }
    }

    /// dst += c * src
    pub fn add_scaled(dst: &SparseVec, src: &SparseVec, c: &Rat) -> SparseVec {
        if c.is_zero() {
            return dst.clone();
        }
        let mut out = SparseVec::with_capacity(dst.len() + src.len());
        let (mut i, mut j) = (0, 0);
        while i < dst.len() || j < src.len() {
            if j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
                out.push(dst[i].clone());
                i += 1;
            } else if i >= dst.len() || src[j].0 < dst[i].0 {
                out.push((src[j].0, c * &src[j].1));
                j += 1;
            } else {
                let val = &dst[i].1 + c * &src[j].1;
                if !val.is_zero() {
                    out.push((dst[i].0, val));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    /// Clears denominators, divides by integer content, makes the leading
    /// (lowest-index) coefficient positive. Identity on the zero vector.
    pub fn normalize_primitive(v: &mut SparseVec) {
        use num_bigint::BigInt;
        use num_integer::Integer;
        if v.is_empty() {
            return;
        }
        let mut lcm = BigInt::one();
        for (_, x) in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        for (_, x) in v.iter() {
            gcd = gcd.gcd(&(x.numer() * &lcm / x.denom()));
        }
        if gcd.is_zero() {
            gcd = BigInt::one();
        }
        let factor = Rat::new(lcm, gcd);
        for (_, x) in v.iter_mut() {
            *x *= &factor;
        }
        if v[0].1.is_negative() {
            for (_, x) in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Sparse exact matrix over the rationals, column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseExactMatrix {
    pub rows: usize,
    pub cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseExactMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.columns[i] = vecops::unit(i);
        }
        m
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Result<Self> {
        for c in &columns {
            for w in c.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::ShapeMismatch("column indices not sorted".into()));
                }
            }
            if let Some((i, _)) = c.last() {
                if *i >= rows {
                    return Err(Error::ShapeMismatch(format!(
                        "row index {i} out of bounds for {rows} rows"
                    )));
                }
            }
            if c.iter().any(|(_, v)| v.is_zero()) {
                return Err(Error::ShapeMismatch("explicit zero entry".into()));
            }
        }
        let cols = columns.len();
        Ok(SparseExactMatrix {
            rows,
            cols,
            columns,
        })
    }

    pub fn from_dense(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut cols = vec![SparseVec::new(); c];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cols[j].push((i, v.clone()));
                }
            }
        }
        SparseExactMatrix {
            rows: r,
            cols: c,
            columns: cols,
        }
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => {
                if v.is_zero() {
                    col.remove(pos);
                } else {
                    col[pos].1 = v;
                }
            }
            Err(pos) => {
                if !v.is_zero() {
                    col.insert(pos, (i, v));
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        match self.columns[j].binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => self.columns[j][pos].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self
                .columns
                .iter()
                .enumerate()
                .all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    /// y = self * x, with x a sparse vector of length self.cols.
    pub fn mat_vec(&self, x: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        for (j, c) in x {
            for (i, a) in &self.columns[*j] {
                let e = acc.entry(*i).or_insert_with(Rat::zero);
                *e += a * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn mat_mul(&self, other: &SparseExactMatrix) -> Result<SparseExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other.columns.iter().map(|c| self.mat_vec(c)).collect();
        Ok(SparseExactMatrix {
            rows: self.rows,
            cols: other.cols,
            columns,
        })
    }

    pub fn sub(&self, other: &SparseExactMatrix) -> Result<SparseExactMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("sub: shapes differ".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| vecops::add_scaled(a, b, &-Rat::one()))
            .collect();
        Ok(SparseExactMatrix {
            rows: self.rows,
            cols: self.cols,
            columns,
        })
    }

    pub fn pow(&self, e: usize) -> Result<SparseExactMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("pow of non-square matrix".into()));
        }
        let mut acc = SparseExactMatrix::identity(self.rows);
        for _ in 0..e {
            acc = self.mat_mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn hcat(parts: &[&SparseExactMatrix]) -> Result<SparseExactMatrix> {
        let rows = parts.first().map_or(0, |m| m.rows);
        let mut columns = Vec::new();
        for m in parts {
            if m.rows != rows {
                return Err(Error::ShapeMismatch("hcat: row counts differ".into()));
            }
            columns.extend(m.columns.iter().cloned());
        }
        Ok(SparseExactMatrix {
            rows,
            cols: columns.len(),
            columns,
        })
    }

    /// Assemble a block matrix from placed parts; unplaced blocks are zero.
    pub fn from_blocks(
        row_dims: &[usize],
        col_dims: &[usize],
        parts: &[(usize, usize, &SparseExactMatrix)],
    ) -> Result<SparseExactMatrix> {
        let row_off: Vec<usize> = std::iter::once(0)
            .chain(row_dims.iter().scan(0, |s, d| {
                *s += d;
                Some(*s)
            }))
            .collect();
        let col_off: Vec<usize> = std::iter::once(0)
            .chain(col_dims.iter().scan(0, |s, d| {
                *s += d;
                Some(*s)
            }))
            .collect();
        let rows = *row_off.last().unwrap();
        let mut columns = vec![SparseVec::new(); *col_off.last().unwrap()];
        for (bi, bj, m) in parts {
            if m.rows != row_dims[*bi] || m.cols != col_dims[*bj] {
                return Err(Error::ShapeMismatch(format!(
                    "block ({bi},{bj}) is {}x{}, slot is {}x{}",
                    m.rows, m.cols, row_dims[*bi], col_dims[*bj]
                )));
            }
            for (j, c) in m.columns.iter().enumerate() {
                let col = &mut columns[col_off[*bj] + j];
                for (i, v) in c {
                    col.push((row_off[*bi] + i, v.clone()));
                }
            }
        }
        for c in &mut columns {
            c.sort_by_key(|e| e.0);
        }
        let cols = columns.len();
        Ok(SparseExactMatrix {
            rows,
            cols,
            columns,
        })
    }

    pub fn transpose(&self) -> SparseExactMatrix {
        let mut cols = vec![SparseVec::new(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c {
                cols[*i].push((j, v.clone()));
            }
        }
        SparseExactMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: cols,
        }
    }

    pub fn trace(&self) -> Result<Rat> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("trace of non-square matrix".into()));
        }
        let mut t = Rat::zero();
        for (j, c) in self.columns.iter().enumerate() {
            if let Ok(pos) = c.binary_search_by_key(&j, |e| e.0) {
                t += &c[pos].1;
            }
        }
        Ok(t)
    }

    /// Rank by exact sparse elimination. Deterministic. Pivot order is
    /// planned by a fast single-word elimination modulo a fixed prime, then
    /// certified by exact replay over Q.
    pub fn rank(&self) -> usize {
        Eliminator::new(self).run_planned()
    }

    /// Rank by exact elimination with pivots searched directly over Q.
    pub fn rank_unplanned(&self) -> usize {
        Eliminator::new(self).run()
    }

    /// Rank over F_p; None if a denominator vanishes mod p.
    pub fn rank_mod_p(&self, p: u64) -> Option<usize> {
        let mut cols: Vec<BTreeMap<usize, u64>> = Vec::with_capacity(self.cols);
        for c in &self.columns {
            let mut m = BTreeMap::new();
            for (i, v) in c {
                let x = rat_mod(v, p)?;
                if x != 0 {
                    m.insert(*i, x);
                }
            }
            cols.push(m);
        }
        let mut rank = 0;
        let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
        for mut col in cols {
            loop {
                let Some((&lead, &val)) = col.iter().next() else {
                    break;
                };
                if let Some(pv) = pivots.get(&lead) {
                    let pv = pv.clone();
                    let factor = p - val; // subtract val * pivot (pivot lead is 1)
                    for (i, a) in pv {
                        let add = mul_mod(a, factor, p);
                        let e = col.entry(i).or_insert(0);
                        *e = ((*e as u128 + add as u128) % p as u128) as u64;
                        if *e == 0 {
                            col.remove(&i);
                        }
                    }
                } else {
                    let inv = inv_mod(val, p);
                    let normalized: BTreeMap<usize, u64> = col
                        .iter()
                        .map(|(i, a)| (*i, mul_mod(*a, inv, p)))
                        .collect();
                    pivots.insert(lead, normalized);
                    rank += 1;
                    break;
                }
            }
        }
        Some(rank)
    }

    /// Rank over Q, verified against the image in F_p for a fixed 62-bit
    /// prime; on mismatch the check is repeated with a second prime and a
    /// persistent mismatch is a hard error.
    pub fn rank_certified(&self) -> Result<usize> {
        let r = self.rank();
        for (attempt, p) in [MOD_P1, MOD_P2].into_iter().enumerate() {
            match self.rank_mod_p(p) {
                Some(rp) if rp == r => return Ok(r),
                Some(rp) => {
                    if attempt == 1 {
                        return Err(Error::ModularMismatch(format!(
                            "rank {r} over Q but {rp} mod {p} (second prime)"
                        )));
                    }
                }
                None => continue,
            }
        }
        Err(Error::ModularMismatch(format!(
            "rank {r} not confirmed by either verification prime"
        )))
    }

    /// Basis of the right kernel {x : A x = 0}, one primitive integer vector
    /// per free column, ordered by free column index.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        // Forward elimination on rows with sparsity-guided pivoting, then
        // back-substitution expressing pivot variables in terms of free ones.
        let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c {
                rows[*i].insert(j, v.clone());
            }
        }
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.cols];
        for (i, r) in rows.iter().enumerate() {
            for j in r.keys() {
                col_rows[*j].insert(i);
            }
        }
        let mut active: BTreeSet<usize> = (0..self.rows).filter(|i| !rows[*i].is_empty()).collect();
        // (pivot col, fully reduced row) in elimination order
        let mut pivot_rows: Vec<(usize, BTreeMap<usize, Rat>)> = Vec::new();
        let mut pivot_cols: BTreeSet<usize> = BTreeSet::new();
        while !active.is_empty() {
            let &prow = active
                .iter()
                .min_by_key(|&&i| (rows[i].len(), i))
                .expect("nonempty active set");
            let pcol = *rows[prow]
                .keys()
                .min_by_key(|&&j| (col_rows[j].len(), j))
                .expect("active row has entries");
            active.remove(&prow);
            let mut prow_data = std::mem::take(&mut rows[prow]);
            for j in prow_data.keys() {
                col_rows[*j].remove(&prow);
            }
            // normalize pivot to 1
            let pval = prow_data.get(&pcol).expect("pivot entry").clone();
            let inv = Rat::one() / pval;
            for v in prow_data.values_mut() {
                *v *= &inv;
            }
            // eliminate pcol from all other active rows
            let targets: Vec<usize> = col_rows[pcol].iter().cloned().collect();
            for t in targets {
                let factor = rows[t].get(&pcol).expect("col index consistent").clone();
                for (j, v) in &prow_data {
                    let delta = -&factor * v;
                    if delta.is_zero() {
                        continue;
                    }
                    let entry = rows[t].entry(*j).or_insert_with(Rat::zero);
                    *entry += delta;
                    if entry.is_zero() {
                        rows[t].remove(j);
                        col_rows[*j].remove(&t);
                    } else {
                        col_rows[*j].insert(t);
                    }
                }
                if rows[t].is_empty() {
                    active.remove(&t);
                }
            }
            pivot_cols.insert(pcol);
            pivot_rows.push((pcol, prow_data));
        }
        // Back-substitution: clear later pivot columns out of earlier rows.
        for k in (0..pivot_rows.len()).rev() {
            let (pcol, prow_data) = pivot_rows[k].clone();
            for (_, earlier) in pivot_rows.iter_mut().take(k) {
                if let Some(f) = earlier.get(&pcol).cloned() {
                    for (j, v) in &prow_data {
                        let delta = -&f * v;
                        if delta.is_zero() {
                            continue;
                        }
                        let entry = earlier.entry(*j).or_insert_with(Rat::zero);
                        *entry += delta;
                        if entry.is_zero() {
                            earlier.remove(j);
                        }
                    }
                }
            }
        }
        let reduced: BTreeMap<usize, &BTreeMap<usize, Rat>> =
            pivot_rows.iter().map(|(c, r)| (*c, r)).collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v: BTreeMap<usize, Rat> = BTreeMap::new();
            v.insert(f, Rat::one());
            for (pcol, row) in &reduced {
                if let Some(c) = row.get(&f) {
                    v.insert(*pcol, -c.clone());
                }
            }
            let mut sv: SparseVec = v.into_iter().collect();
            vecops::normalize_primitive(&mut sv);
            basis.push(sv);
        }
        basis
    }
}

/// Pivot schedule from a single-word elimination modulo a fixed prime.
///
/// Every scheduled pivot entry is a unit mod p, hence nonzero over Q when the
/// same eliminations are replayed exactly; the replay is therefore guaranteed
/// to succeed on the scheduled pivots, and only columns that vanished mod p
/// need a final exact pass.
fn plan_pivots_mod_p(mat: &SparseExactMatrix, p: u64) -> Option<Vec<(usize, usize)>> {
    let mut cols: Vec<BTreeMap<usize, u64>> = Vec::with_capacity(mat.cols);
    for c in &mat.columns {
        let mut m = BTreeMap::new();
        for (i, v) in c {
            let x = rat_mod(v, p)?;
            if x != 0 {
                m.insert(*i, x);
            }
        }
        cols.push(m);
    }
    let mut row_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mat.rows];
    for (j, c) in cols.iter().enumerate() {
        for i in c.keys() {
            row_cols[*i].insert(j);
        }
    }
    let mut active: BTreeSet<usize> = (0..cols.len()).filter(|j| !cols[*j].is_empty()).collect();
    let mut plan = Vec::new();
    while !active.is_empty() {
        let &pcol = active
            .iter()
            .min_by_key(|&&j| (cols[j].len(), j))
            .expect("nonempty active set");
        let prow = *cols[pcol]
            .keys()
            .min_by_key(|&&i| (row_cols[i].len(), i))
            .expect("active column has entries");
        active.remove(&pcol);
        let pdata = std::mem::take(&mut cols[pcol]);
        for i in pdata.keys() {
            row_cols[*i].remove(&pcol);
        }
        let pval = pdata[&prow];
        let pinv = inv_mod(pval, p);
        let targets: Vec<usize> = row_cols[prow].iter().cloned().collect();
        for t in targets {
            let factor = mul_mod(cols[t][&prow], pinv, p);
            let neg = p - factor;
            for (i, v) in &pdata {
                let add = mul_mod(*v, neg, p);
                let e = cols[t].entry(*i).or_insert(0);
                *e = ((*e as u128 + add as u128) % p as u128) as u64;
                if *e == 0 {
                    cols[t].remove(i);
                    row_cols[*i].remove(&t);
                } else {
                    row_cols[*i].insert(t);
                }
            }
            if cols[t].is_empty() {
                active.remove(&t);
            }
        }
        plan.push((pcol, prow));
    }
    Some(plan)
}

/// Column elimination without coordinate tracking, used for rank.
struct Eliminator<'a> {
    mat: &'a SparseExactMatrix,
}

impl<'a> Eliminator<'a> {
    fn new(mat: &'a SparseExactMatrix) -> Self {
        Eliminator { mat }
    }

    /// Exact rank: replay the mod-p pivot schedule over Q, then eliminate
    /// whatever survives (columns that were killed mod p by bad reduction).
    fn run_planned(self) -> usize {
        let Some(plan) = plan_pivots_mod_p(self.mat, MOD_P1) else {
            return self.run();
        };
        let mut cols: Vec<BTreeMap<usize, Rat>> = self
            .mat
            .columns
            .iter()
            .map(|c| c.iter().cloned().collect())
            .collect();
        let mut row_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.mat.rows];
        for (j, c) in cols.iter().enumerate() {
            for i in c.keys() {
                row_cols[*i].insert(j);
            }
        }
        let mut rank = 0;
        for (pcol, prow) in plan {
            let pdata = std::mem::take(&mut cols[pcol]);
            for i in pdata.keys() {
                row_cols[*i].remove(&pcol);
            }
            let pval = pdata.get(&prow).expect("scheduled pivot present").clone();
            assert!(!pval.is_zero(), "scheduled pivot vanished over Q");
            let targets: Vec<usize> = row_cols[prow].iter().cloned().collect();
            for t in targets {
                let factor = cols[t].get(&prow).expect("row index consistent").clone() / &pval;
                for (i, v) in &pdata {
                    let delta = -&factor * v;
                    if delta.is_zero() {
                        continue;
                    }
                    let entry = cols[t].entry(*i).or_insert_with(Rat::zero);
                    *entry += delta;
                    if entry.is_zero() {
                        cols[t].remove(i);
                        row_cols[*i].remove(&t);
                    } else {
                        row_cols[*i].insert(t);
                    }
                }
            }
            rank += 1;
        }
        // columns nonzero over Q that the schedule missed (entries in pZ)
        let leftovers: Vec<SparseVec> = cols
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|c| c.into_iter().collect())
            .collect();
        if !leftovers.is_empty() {
            let mut red = TrackingReducer::new();
            for v in &leftovers {
                red.insert(v);
            }
            rank += red.rank();
        }
        rank
    }

    fn run(self) -> usize {
        // Row-style elimination on the transpose view: operate on columns as
        // the elimination "rows", choosing the sparsest column first and the
        // least-populated row index within it.
        let mut cols: Vec<BTreeMap<usize, Rat>> = self
            .mat
            .columns
            .iter()
            .map(|c| c.iter().cloned().collect())
            .collect();
        let mut row_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.mat.rows];
        for (j, c) in cols.iter().enumerate() {
            for i in c.keys() {
                row_cols[*i].insert(j);
            }
        }
        let mut active: BTreeSet<usize> = (0..cols.len()).filter(|j| !cols[*j].is_empty()).collect();
        let mut rank = 0;
        while !active.is_empty() {
            let &pcol = active
                .iter()
                .min_by_key(|&&j| (cols[j].len(), j))
                .expect("nonempty active set");
            let prow = *cols[pcol]
                .keys()
                .min_by_key(|&&i| (row_cols[i].len(), i))
                .expect("active column has entries");
            active.remove(&pcol);
            let pdata = std::mem::take(&mut cols[pcol]);
            for i in pdata.keys() {
                row_cols[*i].remove(&pcol);
            }
            let pval = pdata.get(&prow).expect("pivot entry").clone();
            let targets: Vec<usize> = row_cols[prow].iter().cloned().collect();
            for t in targets {
                let factor = cols[t].get(&prow).expect("row index consistent").clone() / &pval;
                for (i, v) in &pdata {
                    let delta = -&factor * v;
                    if delta.is_zero() {
                        continue;
                    }
                    let entry = cols[t].entry(*i).or_insert_with(Rat::zero);
                    *entry += delta;
                    if entry.is_zero() {
                        cols[t].remove(i);
                        row_cols[*i].remove(&t);
                    } else {
                        row_cols[*i].insert(t);
                    }
                }
                if cols[t].is_empty() {
                    active.remove(&t);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Incremental exact reducer with coordinate tracking.
///
/// Each inserted vector carries coordinates in terms of the original inserts;
/// the invariant `combination(coords) == vec` is preserved by all operations.
#[derive(Debug, Clone, Default)]
pub struct TrackingReducer {
    pivots: BTreeMap<usize, (SparseVec, SparseVec)>, // lead -> (vec with lead coef 1, coords)
    inserted: usize,
}

impl TrackingReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Inserts a vector with fresh coordinate index. Returns the kernel
    /// coordinates if the vector is dependent on earlier inserts.
    pub fn insert(&mut self, vec: &SparseVec) -> Option<SparseVec> {
        let idx = self.inserted;
        self.inserted += 1;
        let (residual, coords) = self.reduce(vec.clone(), vecops::unit(idx));
        if residual.is_empty() {
            return Some(coords);
        }
        self.store(residual, coords);
        None
    }

    /// Expresses `target` in terms of the inserted vectors, if possible.
    pub fn solve(&self, target: &SparseVec) -> Option<SparseVec> {
        let (residual, coords) = self.reduce_only(target.clone());
        if residual.is_empty() {
            Some(coords)
        } else {
            None
        }
    }

    fn reduce(&self, vec: SparseVec, coords: SparseVec) -> (SparseVec, SparseVec) {
        let mut v = vec;
        let mut c = coords;
        while let Some((lead, val)) = v.first().cloned() {
            let Some((pv, pc)) = self.pivots.get(&lead) else {
                break;
            };
            let f = -val;
            v = vecops::add_scaled(&v, pv, &f);
            c = vecops::add_scaled(&c, pc, &f);
        }
        (v, c)
    }

    fn reduce_only(&self, vec: SparseVec) -> (SparseVec, SparseVec) {
        let mut v = vec;
        let mut c = SparseVec::new();
        while let Some((lead, val)) = v.first().cloned() {
            let Some((pv, pc)) = self.pivots.get(&lead) else {
                break;
            };
            let f = -&val;
            v = vecops::add_scaled(&v, pv, &f);
            c = vecops::add_scaled(&c, pc, &val);
        }
        (v, c)
    }

    fn store(&mut self, mut vec: SparseVec, mut coords: SparseVec) {
        let lead_val = vec[0].1.clone();
        let inv = Rat::one() / lead_val;
        vecops::scale(&mut vec, &inv);
        vecops::scale(&mut coords, &inv);
        let lead = vec[0].0;
        self.pivots.insert(lead, (vec, coords));
    }
}

/// A subspace pair B <= Z of an ambient coordinate space, representing the
/// quotient Z / B. Both bases are linearly independent and `boundary_basis`
/// lies in the span of `cycle_basis`.
#[derive(Debug, Clone)]
pub struct Subquotient {
    pub ambient_dim: usize,
    pub cycle_basis: Vec<SparseVec>,
    pub boundary_basis: Vec<SparseVec>,
}

impl Subquotient {
    /// Builds a subquotient from spanning sets: reduces them to independent
    /// bases (greedily, in input order) and checks that boundaries lie inside
    /// the cycle span.
    pub fn from_spans(
        ambient_dim: usize,
        cycle_span: &[SparseVec],
        boundary_span: &[SparseVec],
    ) -> Result<Self> {
        let mut cycle_red = TrackingReducer::new();
        let mut cycle_basis = Vec::new();
        for v in cycle_span {
            if v.last().map_or(false, |(i, _)| *i >= ambient_dim) {
                return Err(Error::ShapeMismatch("cycle vector out of bounds".into()));
            }
            if cycle_red.insert(v).is_none() {
                cycle_basis.push(v.clone());
            }
        }
        let mut boundary_red = TrackingReducer::new();
        let mut boundary_basis = Vec::new();
        for v in boundary_span {
            if v.last().map_or(false, |(i, _)| *i >= ambient_dim) {
                return Err(Error::ShapeMismatch("boundary vector out of bounds".into()));
            }
            if cycle_red.solve(v).is_none() {
                return Err(Error::BrokenComplex(
                    "boundary vector outside the cycle span".into(),
                ));
            }
            if boundary_red.insert(v).is_none() {
                boundary_basis.push(v.clone());
            }
        }
        Ok(Subquotient {
            ambient_dim,
            cycle_basis,
            boundary_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.cycle_basis.len() - self.boundary_basis.len()
    }

    /// Indices into `cycle_basis` completing `boundary_basis` to a basis of
    /// the cycle span, chosen greedily in basis order.
    pub fn completion(&self) -> Vec<usize> {
        let mut red = TrackingReducer::new();
        for b in &self.boundary_basis {
            let dup = red.insert(b);
            debug_assert!(dup.is_none(), "boundary basis not independent");
        }
        let mut picks = Vec::new();
        for (i, z) in self.cycle_basis.iter().enumerate() {
            if red.insert(z).is_none() {
                picks.push(i);
            }
        }
        debug_assert_eq!(picks.len(), self.dim());
        picks
    }

    /// Matrix of the endomorphism induced on the quotient by `op` (a matrix on
    /// the ambient space), in the basis completing boundaries to cycles.
    pub fn induced_matrix(&self, op: &SparseExactMatrix) -> Result<SparseExactMatrix> {
        induced_map(op, self, self)
    }
}

/// Matrix of the map of quotients induced by `op : ambient(src) -> ambient(dst)`.
///
/// Requires op(cycles(src)) inside span(cycles(dst)) and op(boundaries(src))
/// inside span(boundaries(dst)); anything else is a `NotInduced` error.
pub fn induced_map(
    op: &SparseExactMatrix,
    src: &Subquotient,
    dst: &Subquotient,
) -> Result<SparseExactMatrix> {
    if op.cols != src.ambient_dim || op.rows != dst.ambient_dim {
        return Err(Error::ShapeMismatch(format!(
            "operator {}x{} between ambient dims {} -> {}",
            op.rows, op.cols, src.ambient_dim, dst.ambient_dim
        )));
    }
    let nb = dst.boundary_basis.len();
    let mut solver = TrackingReducer::new();
    for b in &dst.boundary_basis {
        solver.insert(b);
    }
    let completion_dst = dst.completion();
    for idx in &completion_dst {
        solver.insert(&dst.cycle_basis[*idx]);
    }
    for b in &src.boundary_basis {
        let img = op.mat_vec(b);
        let coords = solver.solve(&img).ok_or_else(|| {
            Error::NotInduced("boundary image escapes the target cycle span".into())
        })?;
        if coords.iter().any(|(i, _)| *i >= nb) {
            return Err(Error::NotInduced(
                "boundary image is not a boundary in the target".into(),
            ));
        }
    }
    let completion_src = src.completion();
    let q_src = completion_src.len();
    let q_dst = completion_dst.len();
    let mut columns = Vec::with_capacity(q_src);
    for idx in completion_src {
        let img = op.mat_vec(&src.cycle_basis[idx]);
        let coords = solver.solve(&img).ok_or_else(|| {
            Error::NotInduced("cycle image escapes the target cycle span".into())
        })?;
        let col: SparseVec = coords
            .into_iter()
            .filter(|(i, _)| *i >= nb)
            .map(|(i, v)| (i - nb, v))
            .collect();
        columns.push(col);
    }
    SparseExactMatrix::from_columns(q_dst, columns)
}

/// dim H^1 for the amalgam of Z/4 and Z/6 over Z/2 acting on a space V,
/// given the matrices of -Id, S (order 4) and U (order dividing 6):
/// V^{-Id} / ((V^S + V^U) restricted to V^{-Id}).
pub fn amalgam_h1(
    m_neg: &SparseExactMatrix,
    m_s: &SparseExactMatrix,
    m_u: &SparseExactMatrix,
) -> Result<usize> {
    let n = m_neg.rows;
    for (name, m) in [("-Id", m_neg), ("S", m_s), ("U", m_u)] {
        if m.rows != n || m.cols != n {
            return Err(Error::ShapeMismatch(format!("{name} matrix not {n}x{n}")));
        }
    }
    if !m_neg.pow(2)?.is_identity() {
        return Err(Error::InvalidInput("(-Id)^2 != Id".into()));
    }
    if !m_s.pow(4)?.is_identity() {
        return Err(Error::InvalidInput("S^4 != Id".into()));
    }
    if !m_u.pow(6)?.is_identity() {
        return Err(Error::InvalidInput("U^6 != Id".into()));
    }
    let id = SparseExactMatrix::identity(n);
    let f_neg = m_neg.sub(&id)?.kernel_basis();
    let f_s = m_s.sub(&id)?.kernel_basis();
    let f_u = m_u.sub(&id)?.kernel_basis();
    let su = SparseExactMatrix::from_columns(n, [f_s, f_u].concat())?;
    let rank_su = su.rank();
    let all = SparseExactMatrix::hcat(&[&su, &SparseExactMatrix::from_columns(n, f_neg)?])?;
    let rank_all = all.rank();
    // dim(V^-Id) - dim((V^S + V^U) ∩ V^-Id)
    //   = dim(V^-Id) - (rank_su + dim(V^-Id) - rank_all) = rank_all - rank_su
    Ok(rank_all - rank_su)
}
