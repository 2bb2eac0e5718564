//! Group cohomology of principal congruence subgroups from free presentations.
//!
//! For N >= 2 the image Gbar(N) of Gamma(N) in PSL2(Z) is torsion free and
//! acts freely on the Bass-Serre tree of PSL2(Z) = Z/2 * Z/3, so it is free
//! of rank 1 + mu_bar/6. `derive_presentation` produces an explicit free
//! basis by coset enumeration over PSL2(Z/N) and Schreier rewriting, with the
//! two torsion relators folded in, plus one parabolic word per cusp orbit.
//!
//! `h1_dim` and `parabolic_h1_dim` then turn cocycle spaces into exact ranks.
//! They form an oracle that is independent of the dimension formulas in
//! `modular`; the two must agree for every level and weight.

use crate::arith::{rat_i64, Rat};
use crate::cohomology::{self, Space};
use crate::error::{Error, Result};
use crate::forest::act_matrix;
use crate::linalg::{self, induced_map, SparseExactMatrix, SparseVec};
use crate::modular;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// 2x2 integer matrix, implicitly in SL2(Z).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

pub const MAT_S: Mat2 = Mat2 {
    a: 0,
    b: -1,
    c: 1,
    d: 0,
};
pub const MAT_T: Mat2 = Mat2 {
    a: 1,
    b: 1,
    c: 0,
    d: 1,
};
/// Order-6 element (order 3 in PSL2); S and U generate the amalgam.
pub const MAT_U: Mat2 = Mat2 {
    a: 0,
    b: -1,
    c: 1,
    d: -1,
};
pub const MAT_NEG: Mat2 = Mat2 {
    a: -1,
    b: 0,
    c: 0,
    d: -1,
};

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn mul(&self, o: &Mat2) -> Result<Mat2> {
        let f = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or_else(|| Error::InvalidInput("matrix entry overflow".into()))
        };
        Ok(Mat2 {
            a: f(self.a, o.a, self.b, o.c)?,
            b: f(self.a, o.b, self.b, o.d)?,
            c: f(self.c, o.a, self.d, o.c)?,
            d: f(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse, valid when det = 1.
    pub fn inv(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::IDENTITY
    }

    pub fn is_pm_identity(&self) -> bool {
        self.is_identity() || self.neg().is_identity()
    }

    pub fn pm_eq(&self, other: &Mat2) -> bool {
        *self == *other || self.neg() == *other
    }

    /// Congruent to +Id or -Id modulo `level`.
    pub fn is_pm_identity_mod(&self, level: i64) -> bool {
        let hits = |s: i64| {
            (self.a - s).rem_euclid(level) == 0
                && self.b.rem_euclid(level) == 0
                && self.c.rem_euclid(level) == 0
                && (self.d - s).rem_euclid(level) == 0
        };
        hits(1) || hits(-1)
    }

    pub fn as_rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

/// A free presentation of the image of Gamma(N) in PSL2(Z).
///
/// Generators are SL2(Z) lifts of a free basis; for level >= 3 each lift is
/// the unique one congruent to +Id. Cusp words spell out, in the free basis,
/// a parabolic generator of one cusp stabilizer per cusp orbit; indices are
/// 1-based and a negative index means the inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePresentation {
    pub level: u32,
    pub generators: Vec<Mat2>,
    pub cusp_words: Vec<Vec<i32>>,
}

impl FreePresentation {
    /// Check the structural invariants: generator count 1 + mu_bar/6, every
    /// generator congruent to +-Id mod N without being +-Id, and cusp words
    /// (when present) parabolic and one per cusp.
    pub fn validate(&self) -> Result<()> {
        if self.level < 2 {
            return Err(Error::Presentation(
                "free presentations require level >= 2".into(),
            ));
        }
        let data = modular::gamma_data(self.level as u64)?;
        let expected = 1 + data.mu_bar / 6;
        if self.generators.len() as i64 != expected {
            return Err(Error::Presentation(format!(
                "level {} needs {} free generators, found {}",
                self.level,
                expected,
                self.generators.len()
            )));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.det() != 1 {
                return Err(Error::Presentation(format!(
                    "generator {} has determinant {}",
                    i + 1,
                    g.det()
                )));
            }
            if !g.is_pm_identity_mod(self.level as i64) {
                return Err(Error::Presentation(format!(
                    "generator {} is not congruent to +-Id mod {}",
                    i + 1,
                    self.level
                )));
            }
            if g.is_pm_identity() {
                return Err(Error::Presentation(format!(
                    "generator {} is central",
                    i + 1
                )));
            }
        }
        if !self.cusp_words.is_empty() {
            if self.cusp_words.len() as i64 != data.eps_inf {
                return Err(Error::Presentation(format!(
                    "level {} has {} cusps, found {} cusp words",
                    self.level,
                    data.eps_inf,
                    self.cusp_words.len()
                )));
            }
            for (j, w) in self.cusp_words.iter().enumerate() {
                let m = self.word_element(w)?;
                if m.trace().abs() != 2 || m.is_pm_identity() {
                    return Err(Error::Presentation(format!(
                        "cusp word {} is not parabolic",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluate a word of signed 1-based generator indices.
    pub fn word_element(&self, word: &[i32]) -> Result<Mat2> {
        let mut acc = Mat2::IDENTITY;
        for &i in word {
            if i == 0 || i.unsigned_abs() as usize > self.generators.len() {
                return Err(Error::Presentation(format!(
                    "word index {i} out of range"
                )));
            }
            let g = self.generators[(i.unsigned_abs() - 1) as usize];
            acc = acc.mul(&if i > 0 { g } else { g.inv() })?;
        }
        Ok(acc)
    }

    /// Serialize in the data-file format understood by `parse`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# free presentation data v1");
        let _ = writeln!(
            out,
            "level {} count {} cusps {}",
            self.level,
            self.generators.len(),
            self.cusp_words.len()
        );
        for g in &self.generators {
            let _ = writeln!(out, "{} {} {} {}", g.a, g.b, g.c, g.d);
        }
        for w in &self.cusp_words {
            let parts: Vec<String> = w.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{}", parts.join(","));
        }
        out
    }

    /// Parse the data-file format: a `level N count R cusps C` header, then R
    /// lines of four integers, then C comma-separated signed index words.
    /// Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<FreePresentation> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Presentation("empty presentation file".into()))?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "level" || tok[2] != "count" || tok[4] != "cusps" {
            return Err(Error::Presentation(format!(
                "malformed header line: {header}"
            )));
        }
        let level: u32 = tok[1]
            .parse()
            .map_err(|_| Error::Presentation(format!("bad level: {}", tok[1])))?;
        let count: usize = tok[3]
            .parse()
            .map_err(|_| Error::Presentation(format!("bad count: {}", tok[3])))?;
        let cusps: usize = tok[5]
            .parse()
            .map_err(|_| Error::Presentation(format!("bad cusp count: {}", tok[5])))?;
        let mut generators = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines
                .next()
                .ok_or_else(|| Error::Presentation("missing generator line".into()))?;
            let vals: Vec<i64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::Presentation(format!("bad matrix entry: {t}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 4 {
                return Err(Error::Presentation(format!(
                    "generator line needs 4 entries: {line}"
                )));
            }
            generators.push(Mat2 {
                a: vals[0],
                b: vals[1],
                c: vals[2],
                d: vals[3],
            });
        }
        let mut cusp_words = Vec::with_capacity(cusps);
        for _ in 0..cusps {
            let line = lines
                .next()
                .ok_or_else(|| Error::Presentation("missing cusp word line".into()))?;
            let word: Vec<i32> = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i32>()
                        .map_err(|_| Error::Presentation(format!("bad word index: {t}")))
                })
                .collect::<Result<_>>()?;
            cusp_words.push(word);
        }
        if lines.next().is_some() {
            return Err(Error::Presentation(
                "trailing content after presentation data".into(),
            ));
        }
        let pres = FreePresentation {
            level,
            generators,
            cusp_words,
        };
        pres.validate()?;
        Ok(pres)
    }

    pub fn load(path: &Path) -> Result<FreePresentation> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Presentation(format!("{}: {e}", path.display())))?;
        FreePresentation::parse(&text)
    }
}

/// Presentation shipped with the crate, for levels 2 through 5.
pub fn builtin_presentation(level: u32) -> Result<FreePresentation> {
    let text = match level {
        2 => include_str!("../data/gamma2.txt"),
        3 => include_str!("../data/gamma3.txt"),
        4 => include_str!("../data/gamma4.txt"),
        5 => include_str!("../data/gamma5.txt"),
        _ => {
            return Err(Error::invalid(format!(
                "no shipped presentation for level {level}; use derive_presentation"
            )))
        }
    };
    FreePresentation::parse(text)
}

// Coset enumeration over PSL2(Z/N). Letters: 0 is the order-2 element S,
// 1 is the order-3 element ST.

struct Enumeration {
    /// Transversal representative per coset; reps[0] = Id.
    reps: Vec<Mat2>,
    /// BFS letter word leading to each representative.
    words: Vec<Vec<u8>>,
    /// Right multiplication action of the two letters on cosets.
    step: Vec<[usize; 2]>,
}

fn psl_key(m: &Mat2, level: i64) -> [i64; 4] {
    let pos = [
        m.a.rem_euclid(level),
        m.b.rem_euclid(level),
        m.c.rem_euclid(level),
        m.d.rem_euclid(level),
    ];
    let neg = [
        (-m.a).rem_euclid(level),
        (-m.b).rem_euclid(level),
        (-m.c).rem_euclid(level),
        (-m.d).rem_euclid(level),
    ];
    pos.min(neg)
}

fn enumerate_cosets(level: i64) -> Result<Enumeration> {
    let letters = [MAT_S, MAT_S.mul(&MAT_T)?];
    let mut index: HashMap<[i64; 4], usize> = HashMap::new();
    index.insert(psl_key(&Mat2::IDENTITY, level), 0);
    let mut reps = vec![Mat2::IDENTITY];
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut step: Vec<[usize; 2]> = Vec::new();
    let mut head = 0;
    while head < reps.len() {
        let cur = reps[head];
        let mut row = [0usize; 2];
        for (li, lm) in letters.iter().enumerate() {
            let next_mat = cur.mul(lm)?;
            let key = psl_key(&next_mat, level);
            let next = match index.get(&key) {
                Some(&i) => i,
                None => {
                    // Tree edge: extend the transversal along it, so the
                    // Schreier element of this edge is exactly the identity.
                    let i = reps.len();
                    index.insert(key, i);
                    reps.push(next_mat);
                    let mut w = words[head].clone();
                    w.push(li as u8);
                    words.push(w);
                    i
                }
            };
            row[li] = next;
        }
        step.push(row);
        head += 1;
    }
    Ok(Enumeration { reps, words, step })
}

/// Pick the SL2(Z) lift: the one congruent to +Id for level >= 3, otherwise
/// the sign making the first nonzero entry positive.
fn normalize_lift(g: &Mat2, level: i64) -> Result<Mat2> {
    let congruent_to = |m: &Mat2, s: i64| {
        (m.a - s).rem_euclid(level) == 0
            && m.b.rem_euclid(level) == 0
            && m.c.rem_euclid(level) == 0
            && (m.d - s).rem_euclid(level) == 0
    };
    if level >= 3 {
        if congruent_to(g, 1) {
            return Ok(*g);
        }
        if congruent_to(g, -1) {
            return Ok(g.neg());
        }
        return Err(Error::Presentation(
            "derived generator is not in the congruence subgroup".into(),
        ));
    }
    if !g.is_pm_identity_mod(level) {
        return Err(Error::Presentation(
            "derived generator is not in the congruence subgroup".into(),
        ));
    }
    for v in [g.a, g.b, g.c, g.d] {
        if v > 0 {
            return Ok(*g);
        }
        if v < 0 {
            return Ok(g.neg());
        }
    }
    Err(Error::Presentation("derived generator is zero".into()))
}

/// Derive a free presentation of the image of Gamma(N) in PSL2(Z) by coset
/// enumeration and Schreier rewriting. Works for any level >= 2 small enough
/// to enumerate PSL2(Z/N).
pub fn derive_presentation(level: u32) -> Result<FreePresentation> {
    if level < 2 {
        return Err(Error::invalid(
            "free presentations require level >= 2; level 1 has torsion",
        ));
    }
    let data = modular::gamma_data(level as u64)?;
    let nn = level as i64;
    let en = enumerate_cosets(nn)?;
    if en.reps.len() as i64 != data.mu_bar {
        return Err(Error::Presentation(format!(
            "enumerated {} cosets at level {}, expected {}",
            en.reps.len(),
            level,
            data.mu_bar
        )));
    }
    let letters = [MAT_S, MAT_S.mul(&MAT_T)?];
    let n = en.reps.len();
    let schreier = |c: usize, l: usize| -> Result<Mat2> {
        en.reps[c]
            .mul(&letters[l])?
            .mul(&en.reps[en.step[c][l]].inv())
    };
    let mut generators: Vec<Mat2> = Vec::new();
    // Expression of each directed edge's Schreier element in the free basis.
    let mut expr: Vec<[Vec<i32>; 2]> = vec![[Vec::new(), Vec::new()]; n];

    // Order-2 relator: edges pair up, gamma(c,s) gamma(cs,s) = 1.
    let mut seen = vec![false; n];
    for c in 0..n {
        if seen[c] {
            continue;
        }
        let c2 = en.step[c][0];
        if c2 == c {
            return Err(Error::Presentation(
                "order-2 letter fixes a coset: the subgroup has torsion".into(),
            ));
        }
        seen[c] = true;
        seen[c2] = true;
        let g = schreier(c, 0)?;
        if !g.mul(&schreier(c2, 0)?)?.is_pm_identity() {
            return Err(Error::Presentation("order-2 relator check failed".into()));
        }
        if !g.is_pm_identity() {
            generators.push(normalize_lift(&g, nn)?);
            let idx = generators.len() as i32;
            expr[c][0] = vec![idx];
            expr[c2][0] = vec![-idx];
        }
    }

    // Order-3 relator: edges come in 3-cycles with product 1; all but the
    // last nontrivial edge of a cycle give fresh free generators.
    let mut seen = vec![false; n];
    for c0 in 0..n {
        if seen[c0] {
            continue;
        }
        let c1 = en.step[c0][1];
        let c2 = en.step[c1][1];
        if c1 == c0 || c2 == c0 || c2 == c1 || en.step[c2][1] != c0 {
            return Err(Error::Presentation(
                "order-3 letter has a degenerate orbit: the subgroup has torsion".into(),
            ));
        }
        seen[c0] = true;
        seen[c1] = true;
        seen[c2] = true;
        let cyc = [c0, c1, c2];
        let gs = [schreier(c0, 1)?, schreier(c1, 1)?, schreier(c2, 1)?];
        if !gs[0].mul(&gs[1])?.mul(&gs[2])?.is_pm_identity() {
            return Err(Error::Presentation("order-3 relator check failed".into()));
        }
        let nontrivial: Vec<usize> = (0..3).filter(|&i| !gs[i].is_pm_identity()).collect();
        if nontrivial.len() == 1 {
            return Err(Error::Presentation(
                "order-3 relator with a single nontrivial edge".into(),
            ));
        }
        if let Some((&last, rest)) = nontrivial.split_last() {
            for &i in rest {
                generators.push(normalize_lift(&gs[i], nn)?);
                expr[cyc[i]][1] = vec![generators.len() as i32];
            }
            // gamma(last) = (gamma(last+1) gamma(last+2))^{-1} cyclically
            let mut tail: Vec<i32> = Vec::new();
            tail.extend_from_slice(&expr[cyc[(last + 1) % 3]][1]);
            tail.extend_from_slice(&expr[cyc[(last + 2) % 3]][1]);
            expr[cyc[last]][1] = tail.iter().rev().map(|i| -i).collect();
        }
    }

    let expected = 1 + data.mu_bar / 6;
    if generators.len() as i64 != expected {
        return Err(Error::Presentation(format!(
            "Schreier reduction produced {} generators at level {}, expected {}",
            generators.len(),
            level,
            expected
        )));
    }

    // One parabolic word per orbit of the translation on cosets. The orbit
    // size is the cusp width, which is the level for these groups.
    let t_step = |c: usize| en.step[en.step[c][0]][1];
    let mut tn = Mat2::IDENTITY;
    for _ in 0..nn {
        tn = tn.mul(&MAT_T)?;
    }
    let mut seen = vec![false; n];
    let mut cusp_words: Vec<Vec<i32>> = Vec::new();
    for c0 in 0..n {
        if seen[c0] {
            continue;
        }
        let mut orbit = vec![c0];
        seen[c0] = true;
        let mut c = t_step(c0);
        while c != c0 {
            seen[c] = true;
            orbit.push(c);
            if orbit.len() > n {
                return Err(Error::Presentation(
                    "translation orbit failed to close".into(),
                ));
            }
            c = t_step(c);
        }
        if orbit.len() as i64 != nn {
            return Err(Error::Presentation(format!(
                "cusp width {} differs from the level {}",
                orbit.len(),
                level
            )));
        }
        // Letter word for rep * T^N * rep^{-1}; T = s t and the inverse word
        // substitutes s for s^{-1} and t t for t^{-1}.
        let mut letter_word: Vec<u8> = en.words[c0].clone();
        for _ in 0..nn {
            letter_word.push(0);
            letter_word.push(1);
        }
        for &l in en.words[c0].iter().rev() {
            if l == 0 {
                letter_word.push(0);
            } else {
                letter_word.push(1);
                letter_word.push(1);
            }
        }
        let mut word: Vec<i32> = Vec::new();
        let mut cur = 0usize;
        for &l in &letter_word {
            word.extend_from_slice(&expr[cur][l as usize]);
            cur = en.step[cur][l as usize];
        }
        if cur != 0 {
            return Err(Error::Presentation(
                "cusp word does not return to the trivial coset".into(),
            ));
        }
        let direct = en.reps[c0].mul(&tn)?.mul(&en.reps[c0].inv())?;
        let mut prod = Mat2::IDENTITY;
        for &i in &word {
            let g = generators[(i.unsigned_abs() - 1) as usize];
            prod = prod.mul(&if i > 0 { g } else { g.inv() })?;
        }
        if !prod.pm_eq(&direct) {
            return Err(Error::Presentation("cusp word rewriting mismatch".into()));
        }
        cusp_words.push(word);
    }
    if cusp_words.len() as i64 != data.eps_inf {
        return Err(Error::Presentation(format!(
            "found {} cusp orbits at level {}, expected {}",
            cusp_words.len(),
            level,
            data.eps_inf
        )));
    }

    let pres = FreePresentation {
        level,
        generators,
        cusp_words,
    };
    pres.validate()?;
    Ok(pres)
}

// Symmetric power actions.

/// Coefficients of (u x + v y)^m in the basis x^(m-i) y^i.
fn lin_pow(u: i64, v: i64, m: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for _ in 0..m {
        let mut nxt = vec![BigInt::zero(); c.len() + 1];
        for (i, val) in c.iter().enumerate() {
            nxt[i] += val * u;
            nxt[i + 1] += val * v;
        }
        c = nxt;
    }
    c
}

/// Matrix of Sym^k of g on binary forms, basis x^k, x^(k-1) y, ..., y^k.
/// The convention g.x = a x + c y, g.y = b x + d y makes g -> sym_pow(g, k)
/// multiplicative.
pub fn sym_pow(g: &Mat2, k: usize) -> SparseExactMatrix {
    let mut columns: Vec<SparseVec> = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let first = lin_pow(g.a, g.c, k - j);
        let second = lin_pow(g.b, g.d, j);
        let mut dense = vec![BigInt::zero(); k + 1];
        for (i1, v1) in first.iter().enumerate() {
            for (i2, v2) in second.iter().enumerate() {
                dense[i1 + i2] += v1 * v2;
            }
        }
        let col: SparseVec = dense
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, Rat::from_integer(v)))
            .collect();
        columns.push(col);
    }
    SparseExactMatrix::from_columns(k + 1, columns).expect("well-shaped symmetric power")
}

/// Sym^k matrices for a fixed list of group elements.
pub struct VkAction {
    pub k: usize,
    pub matrices: Vec<SparseExactMatrix>,
}

impl VkAction {
    pub fn new(k: usize, elements: &[Mat2]) -> VkAction {
        VkAction {
            k,
            matrices: elements.iter().map(|m| sym_pow(m, k)).collect(),
        }
    }
}

/// dim H^1(Gamma(N), V_k) from a free presentation: r(k+1) - (k+1) + dim of
/// the invariants, computed as one exact rank. Odd k at level <= 2 vanishes
/// because -Id lies in the group and acts by -1.
pub fn h1_dim(pres: &FreePresentation, k: usize) -> Result<usize> {
    pres.validate()?;
    if k % 2 == 1 && pres.level <= 2 {
        return Ok(0);
    }
    let dim = k + 1;
    let r = pres.generators.len();
    let blocks: Vec<SparseExactMatrix> = pres
        .generators
        .iter()
        .map(|g| sym_pow(g, k).sub(&SparseExactMatrix::identity(dim)))
        .collect::<Result<_>>()?;
    let parts: Vec<(usize, usize, &SparseExactMatrix)> =
        blocks.iter().enumerate().map(|(i, m)| (i, 0, m)).collect();
    let stacked = SparseExactMatrix::from_blocks(&vec![dim; r], &[dim], &parts)?;
    // rank(stacked) = (k+1) - dim of invariants = dim B^1
    Ok(r * dim - stacked.rank())
}

/// Dimension of the parabolic part: classes whose value on each cusp word
/// lands in the image of (action of the word) - Id.
pub fn parabolic_h1_dim(pres: &FreePresentation, k: usize) -> Result<usize> {
    pres.validate()?;
    if pres.cusp_words.is_empty() {
        return Err(Error::Presentation(
            "parabolic cohomology needs cusp words".into(),
        ));
    }
    if k % 2 == 1 && pres.level <= 2 {
        return Ok(0);
    }
    let dim = k + 1;
    let r = pres.generators.len();
    let c = pres.cusp_words.len();
    let id = SparseExactMatrix::identity(dim);
    let rho: Vec<SparseExactMatrix> = pres.generators.iter().map(|g| sym_pow(g, k)).collect();
    let rho_inv: Vec<SparseExactMatrix> = pres
        .generators
        .iter()
        .map(|g| sym_pow(&g.inv(), k))
        .collect();

    // For cusp j the cocycle value on its word is sum_i A[j][i] f(g_i) where
    // the A blocks accumulate prefix actions by the cocycle rule
    // f(gh) = f(g) + g f(h), f(g^-1) = -g^-1 f(g).
    let mut parts: Vec<(usize, usize, SparseExactMatrix)> = Vec::new();
    let mut cusp_ranks = 0usize;
    for (j, w) in pres.cusp_words.iter().enumerate() {
        let mut acc: Vec<Vec<Vec<Rat>>> = vec![vec![vec![Rat::zero(); dim]; dim]; r];
        let mut prefix = SparseExactMatrix::identity(dim);
        for &letter in w {
            let i = (letter.unsigned_abs() - 1) as usize;
            if letter > 0 {
                add_into(&mut acc[i], &prefix, 1);
                prefix = prefix.mat_mul(&rho[i])?;
            } else {
                prefix = prefix.mat_mul(&rho_inv[i])?;
                add_into(&mut acc[i], &prefix, -1);
            }
        }
        // prefix is now the action of the full word
        let m_j = prefix.sub(&id)?;
        cusp_ranks += m_j.rank();
        for (i, grid) in acc.iter().enumerate() {
            let m = grid_to_matrix(grid);
            if m.nnz() > 0 {
                parts.push((j, i, m));
            }
        }
        parts.push((j, r + j, m_j));
    }
    let borrowed: Vec<(usize, usize, &SparseExactMatrix)> =
        parts.iter().map(|(i, j, m)| (*i, *j, m)).collect();
    let big = SparseExactMatrix::from_blocks(&vec![dim; c], &vec![dim; r + c], &borrowed)?;
    // rank of the composite "values at cusps modulo parabolic images" map
    let rank_phi = big.rank() - cusp_ranks;
    let z_par = r * dim - rank_phi;

    let gen_blocks: Vec<SparseExactMatrix> = rho
        .iter()
        .map(|m| m.sub(&id))
        .collect::<Result<_>>()?;
    let gen_parts: Vec<(usize, usize, &SparseExactMatrix)> = gen_blocks
        .iter()
        .enumerate()
        .map(|(i, m)| (i, 0, m))
        .collect();
    let coboundaries = SparseExactMatrix::from_blocks(&vec![dim; r], &[dim], &gen_parts)?.rank();
    Ok(z_par - coboundaries)
}

fn add_into(grid: &mut [Vec<Rat>], m: &SparseExactMatrix, sign: i64) {
    let s = rat_i64(sign);
    for (j, col) in m.columns().iter().enumerate() {
        for (i, v) in col {
            grid[*i][j] += v * &s;
        }
    }
}

fn grid_to_matrix(grid: &[Vec<Rat>]) -> SparseExactMatrix {
    let rows = grid.len();
    let cols = if rows > 0 { grid[0].len() } else { 0 };
    let mut columns: Vec<SparseVec> = vec![Vec::new(); cols];
    for (i, row) in grid.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                columns[j].push((i, v.clone()));
            }
        }
    }
    SparseExactMatrix::from_columns(rows, columns).expect("well-shaped dense grid")
}

/// H^1(SL2(Z), V_k) via the amalgam formula, as a check value for level 1.
pub fn amalgam_h1_vk(k: usize) -> Result<usize> {
    let action = VkAction::new(k, &[MAT_NEG, MAT_S, MAT_U]);
    linalg::amalgam_h1(&action.matrices[0], &action.matrices[1], &action.matrices[2])
}

/// Betti numbers of the level-1 moduli space by the direct route: invariants
/// of the configuration cohomology plus amalgam H^1 in one degree lower.
pub fn prelim_route(n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("need at least one marked point"));
    }
    let tables = cohomology::tables(n)?;
    let mults = tables.multiplicities(Space::B)?;
    let mut betti = vec![0usize; n + 1];
    for (m, slot) in betti.iter_mut().enumerate() {
        let mut total = mults.by_degree(m, 0);
        for p in 0..m {
            let q = m - 1 - p;
            let combined = tables.combined_block(Space::B, p, q);
            if combined.subq.dim() == 0 {
                continue;
            }
            let mut induced = Vec::with_capacity(3);
            for g in [MAT_NEG, MAT_S, MAT_U] {
                let ambient = combined.ambient_matrix(&tables, |e| act_matrix(g.as_rows(), e))?;
                induced.push(induced_map(&ambient, &combined.subq, &combined.subq)?);
            }
            total += linalg::amalgam_h1(&induced[0], &induced[1], &induced[2])?;
        }
        *slot = total;
    }
    Ok(betti)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_presentations_have_expected_shape() {
        let expected_rank = [(2u32, 2usize), (3, 3), (4, 5), (5, 11)];
        for (level, rank) in expected_rank {
            let pres = derive_presentation(level).unwrap();
            assert_eq!(pres.generators.len(), rank, "rank at level {level}");
            let data = modular::gamma_data(level as u64).unwrap();
            assert_eq!(pres.cusp_words.len() as i64, data.eps_inf);
            pres.validate().unwrap();
        }
    }

    #[test]
    fn shipped_data_files_match_derivation() {
        for (level, text) in [
            (2u32, include_str!("../data/gamma2.txt")),
            (3, include_str!("../data/gamma3.txt")),
            (4, include_str!("../data/gamma4.txt")),
            (5, include_str!("../data/gamma5.txt")),
        ] {
            let derived = derive_presentation(level).unwrap();
            assert_eq!(derived.to_file_string(), text, "data file at level {level}");
            let parsed = FreePresentation::parse(text).unwrap();
            assert_eq!(parsed, derived);
        }
    }

    #[test]
    fn classical_level_two_presentation() {
        // T^2 and its transpose freely generate the image of Gamma(2).
        let pres = FreePresentation {
            level: 2,
            generators: vec![
                Mat2 {
                    a: 1,
                    b: 2,
                    c: 0,
                    d: 1,
                },
                Mat2 {
                    a: 1,
                    b: 0,
                    c: 2,
                    d: 1,
                },
            ],
            cusp_words: Vec::new(),
        };
        assert_eq!(h1_dim(&pres, 2).unwrap(), 3);
        assert_eq!(h1_dim(&pres, 0).unwrap(), 2);
        let built = builtin_presentation(2).unwrap();
        assert_eq!(h1_dim(&built, 2).unwrap(), 3);
    }

    #[test]
    fn h1_matches_modular_dimension_formulas() {
        for level in 2u32..=5 {
            let pres = builtin_presentation(level).unwrap();
            for k in 0usize..=8 {
                let total = modular::w_dims(k as u64, level as u64).unwrap().total;
                assert_eq!(
                    h1_dim(&pres, k).unwrap() as i64,
                    total,
                    "H^1 dim at level {level}, weight k {k}"
                );
            }
        }
    }

    #[test]
    fn parabolic_matches_cusp_form_dimensions() {
        for level in 2u32..=5 {
            let pres = builtin_presentation(level).unwrap();
            let genus = modular::gamma_data(level as u64).unwrap().genus;
            assert_eq!(parabolic_h1_dim(&pres, 0).unwrap() as i64, 2 * genus);
            for k in 0usize..=8 {
                let low = modular::w_dims(k as u64, level as u64).unwrap().w_low;
                assert_eq!(
                    parabolic_h1_dim(&pres, k).unwrap() as i64,
                    low,
                    "parabolic dim at level {level}, weight k {k}"
                );
            }
        }
    }

    #[test]
    fn sym_pow_is_multiplicative() {
        let st = MAT_S.mul(&MAT_T).unwrap();
        for k in [0usize, 1, 3, 6] {
            let lhs = sym_pow(&st, k);
            let rhs = sym_pow(&MAT_S, k).mat_mul(&sym_pow(&MAT_T, k)).unwrap();
            assert_eq!(lhs.rows, rhs.rows);
            for i in 0..lhs.rows {
                for j in 0..lhs.cols {
                    assert_eq!(lhs.get(i, j), rhs.get(i, j));
                }
            }
            assert!(sym_pow(&Mat2::IDENTITY, k).is_identity());
        }
    }

    #[test]
    fn amalgam_examples() {
        assert_eq!(amalgam_h1_vk(0).unwrap(), 0);
        // first Eisenstein class: weight 4 has E_4, no cusp forms
        assert_eq!(amalgam_h1_vk(2).unwrap(), 1);
        assert_eq!(amalgam_h1_vk(10).unwrap(), 3);
        for k in 0usize..=14 {
            let total = modular::w_dims(k as u64, 1).unwrap().total;
            assert_eq!(amalgam_h1_vk(k).unwrap() as i64, total, "V_{k}");
        }
    }

    #[test]
    fn amalgam_rejects_wrong_orders() {
        let action = VkAction::new(3, &[MAT_NEG, MAT_T, MAT_U]);
        let r = linalg::amalgam_h1(&action.matrices[0], &action.matrices[1], &action.matrices[2]);
        assert!(r.is_err(), "T does not have order 4");
    }

    #[test]
    fn prelim_route_small_points() {
        assert_eq!(prelim_route(1).unwrap(), vec![1, 0]);
        assert_eq!(prelim_route(2).unwrap(), vec![1, 0, 0]);
    }
}
