//! Assembly of the two-column second page for the moduli spaces: Betti
//! numbers, Poincare-Serre and equivariant mixed Hodge polynomials, plus the
//! JSON/CSV/LaTeX emitters and the result cache backing the CLI.

use crate::arith::{rat_i64, Rat};
use crate::cohomology::{self, Space};
use crate::error::{Error, Result};
use crate::forest;
use crate::modular;
use crate::partitions::{partition_string, partitions};
use crate::repring::{hodge_monomials, ClassFunction, Poly3, RepPoly};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// The second page of the forgetful-map spectral sequence. Only columns 0
/// and 1 are present and there are no differentials, so this is the whole
/// story additively.
#[derive(Debug, Clone)]
pub struct E2Page {
    pub n: usize,
    pub level: u32,
    /// (degree, weight) -> dimension of the invariant part in column 0.
    pub column0: BTreeMap<(usize, usize), usize>,
    /// (degree, k) -> multiplicity of V_k paired with the automorphic dims.
    pub column1: BTreeMap<(usize, usize), (usize, modular::H1Dims)>,
}

pub fn assemble_e2(n: usize, level: u32) -> Result<E2Page> {
    if n == 0 {
        return Err(Error::invalid("need at least one marked point"));
    }
    if level == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let dims = cohomology::dim_tables(n)?;
    let mults = dims.multiplicities(Space::B)?;
    let mut column0: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&(p, q, k), &m) in &mults.m {
        if k == 0 {
            *column0.entry((p + q, p + 2 * q)).or_default() += m;
        }
        *counts.entry((p + q, k)).or_default() += m;
    }
    let mut column1 = BTreeMap::new();
    for ((d, k), m) in counts {
        let w = modular::w_dims(k as u64, level as u64)?;
        column1.insert((d, k), (m, w));
    }
    Ok(E2Page {
        n,
        level,
        column0,
        column1,
    })
}

impl E2Page {
    /// Total dimension of the column-1 entry in the given degree.
    pub fn column1_dim(&self, degree: usize) -> usize {
        self.column1
            .iter()
            .filter(|(&(d, _), _)| d == degree)
            .map(|(_, &(m, ref w))| m * w.total as usize)
            .sum()
    }
}

/// Betti numbers of the n-pointed level-N moduli space, degrees 0..=n.
pub fn betti(n: usize, level: u32) -> Result<Vec<usize>> {
    let page = assemble_e2(n, level)?;
    let mut out = vec![0usize; n + 1];
    for (&(d, _), &m) in &page.column0 {
        if d > n {
            return Err(Error::BrokenComplex(format!(
                "invariant class in degree {d} beyond the space dimension {n}"
            )));
        }
        out[d] += m;
    }
    for (&(d, _), &(m, ref w)) in &page.column1 {
        let c = m * w.total as usize;
        if c == 0 {
            continue;
        }
        if d + 1 > n {
            return Err(Error::BrokenComplex(format!(
                "column-1 class in degree {} beyond the space dimension {n}",
                d + 1
            )));
        }
        out[d + 1] += c;
    }
    Ok(out)
}

/// Tate twist exponent (p + 2q - k)/2; its integrality is a weight-parity
/// invariant of the model and any violation is a hard error.
fn tate_twist(p: usize, q: usize, k: usize) -> Result<usize> {
    let w = p + 2 * q;
    if k > w || (w - k) % 2 != 0 {
        return Err(Error::invalid(format!(
            "Tate twist exponent is not a non-negative integer at p={p} q={q} k={k}"
        )));
    }
    Ok((w - k) / 2)
}

/// Multiplicity data of a cohomology space as class functions per (p, q, k):
/// plain dimensions from the rank route, or characters from the exact route
/// in equivariant mode.
fn multiplicity_characters(
    n: usize,
    space: Space,
    equivariant: bool,
) -> Result<BTreeMap<(usize, usize, usize), ClassFunction>> {
    let mut out = BTreeMap::new();
    if !equivariant {
        let dims = cohomology::dim_tables(n)?;
        for (&key, &m) in &dims.multiplicities(space)?.m {
            out.insert(key, ClassFunction::from_dim(n, m as i64));
        }
        return Ok(out);
    }
    let tables = cohomology::tables(n)?;
    let mults = tables.multiplicities(space)?;
    let classes = partitions(n);
    // traces once per underlying graded block, shared across k
    let mut block_traces: BTreeMap<(usize, usize, i64, usize), Rat> = BTreeMap::new();
    for (&(p, q, k), &m) in &mults.m {
        let mut cf = ClassFunction::zero(n);
        for (ci, lambda) in classes.iter().enumerate() {
            let mut val = Rat::zero();
            for h in [k as i64, k as i64 + 2] {
                let entry = block_traces.entry((p, q, h, ci));
                let tr = match entry {
                    std::collections::btree_map::Entry::Occupied(e) => e.get().clone(),
                    std::collections::btree_map::Entry::Vacant(v) => {
                        let b = forest::GradedBlockIndex { p, q, h };
                        let tr = tables.sn_trace(lambda, space, b)?;
                        v.insert(tr.clone());
                        tr
                    }
                };
                if h == k as i64 {
                    val += tr;
                } else {
                    val -= tr;
                }
            }
            cf.set(lambda.clone(), val);
        }
        if cf.dim() != rat_i64(m as i64) {
            return Err(Error::MultiplicityMismatch(format!(
                "character of the (p={p}, q={q}, k={k}) multiplicity space has \
                 dimension {} instead of {m}",
                cf.dim()
            )));
        }
        out.insert((p, q, k), cf);
    }
    Ok(out)
}

/// The configuration-space page as a representation-valued polynomial:
/// sum over blocks of t^(p+q) (uv)^twist g^k_(p,q) [V_k].
fn h_rep_poly(n: usize, equivariant: bool) -> Result<RepPoly> {
    let chars = multiplicity_characters(n, Space::H, equivariant)?;
    let mut e3 = RepPoly::new();
    for ((p, q, k), cf) in chars {
        let tw = tate_twist(p, q, k)?;
        e3.add_term((p + q, tw, tw), k, &cf);
    }
    Ok(e3)
}

/// Mixed Hodge polynomial of the level-N moduli space as a Poly3 of class
/// functions: divide the configuration page by the curve factor, then pair
/// the V_k content with the weight-graded automorphic dimensions.
pub fn moduli_poly(n: usize, level: u32, equivariant: bool) -> Result<Poly3> {
    if level == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let e3 = h_rep_poly(n, equivariant)?;
    let quot = e3.divide_by_curve_factor()?;
    if !equivariant {
        // the quotient must reproduce the independently computed dimensions
        let expect = cohomology::dim_tables(n)?.poincare(Space::B);
        let got = quot.dims_by_t();
        let expect_r: Vec<Rat> = expect.iter().map(|&d| rat_i64(d as i64)).collect();
        if got != expect_r {
            return Err(Error::InexactDivision(format!(
                "curve-factor quotient dims {got:?} differ from the rank route {expect:?}"
            )));
        }
    }
    let mut out = Poly3::new();
    for (&(t, u, v), vec) in &quot.coeffs {
        for (&k, cf) in &vec.mults {
            if k == 0 {
                out.add_term((t, u, v), cf);
            }
            let w = modular::w_dims(k as u64, level as u64)?;
            let s = w.w_low / 2;
            if s != 0 {
                let sc = cf.scaled(&rat_i64(s));
                out.add_term((t + 1, u + k + 1, v), &sc);
                out.add_term((t + 1, u, v + k + 1), &sc);
            }
            if w.w_high != 0 {
                out.add_term((t + 1, u + k + 1, v + k + 1), &cf.scaled(&rat_i64(w.w_high)));
            }
        }
    }
    Ok(out)
}

/// Mixed Hodge polynomial of the configuration space F(E, n): every V_k
/// expands into its Hodge monomials u^a v^b with a + b = k.
pub fn config_poly(n: usize, equivariant: bool) -> Result<Poly3> {
    let chars = multiplicity_characters(n, Space::H, equivariant)?;
    let mut out = Poly3::new();
    for ((p, q, k), cf) in chars {
        let tw = tate_twist(p, q, k)?;
        for (a, b) in hodge_monomials(k) {
            out.add_term((p + q, tw + a, tw + b), &cf);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meta {
    pub version: String,
    pub basis_hash: String,
    pub elapsed_ms: u128,
}

/// Final artifact of one computation, ready for emission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRecord {
    pub n: usize,
    /// Present for moduli records, absent for configuration spaces.
    pub level: Option<u32>,
    pub betti: Vec<BigInt>,
    /// Sorted (t, u, v, coefficient) terms of the mixed Hodge polynomial.
    pub poincare_serre: Vec<(usize, usize, usize, BigInt)>,
    /// Irreducible decomposition: partition label -> polynomial terms.
    pub equivariant: Option<BTreeMap<String, Vec<(usize, usize, usize, BigInt)>>>,
    pub meta: Meta,
}

/// Stable hash of the monomial basis layout for n points.
pub fn basis_hash(n: usize) -> String {
    let bt = forest::basis_table(n);
    let mut hasher = Sha256::new();
    hasher.update(format!("n {n}\n").as_bytes());
    for (b, monos) in &bt.blocks {
        hasher.update(format!("{} {} {} {}\n", b.p, b.q, b.h, monos.len()).as_bytes());
    }
    let digest = hasher.finalize();
    let mut out = String::new();
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn rat_to_bigint(v: &Rat, what: &str) -> Result<BigInt> {
    if !v.denom().is_one() {
        return Err(Error::MultiplicityMismatch(format!(
            "{what} is not an integer: {v}"
        )));
    }
    Ok(v.numer().clone())
}

/// Extract one class's polynomial as sorted integer terms.
fn class_terms(poly: &Poly3, cycle_type: &[usize], what: &str) -> Result<Vec<(usize, usize, usize, BigInt)>> {
    let mut out = Vec::new();
    for (&(t, u, v), val) in &poly.class_polynomial(cycle_type) {
        let c = rat_to_bigint(val, what)?;
        if !c.is_zero() {
            out.push((t, u, v, c));
        }
    }
    Ok(out)
}

/// Decompose every coefficient into irreducibles; non-integral or negative
/// multiplicities are hard errors.
fn decompose_poly(poly: &Poly3) -> Result<BTreeMap<String, Vec<(usize, usize, usize, BigInt)>>> {
    let mut per_lambda: BTreeMap<Vec<usize>, Vec<(usize, usize, usize, BigInt)>> = BTreeMap::new();
    for (&(t, u, v), cf) in &poly.coeffs {
        for (lambda, mult) in cf.decompose() {
            let c = rat_to_bigint(&mult, "irreducible multiplicity")?;
            if c.is_negative() {
                return Err(Error::NegativeMultiplicity(format!(
                    "irreducible {} at t^{t} u^{u} v^{v}",
                    partition_string(&lambda)
                )));
            }
            if !c.is_zero() {
                per_lambda.entry(lambda).or_default().push((t, u, v, c));
            }
        }
    }
    Ok(per_lambda
        .into_iter()
        .map(|(lambda, mut terms)| {
            terms.sort();
            (partition_string(&lambda), terms)
        })
        .collect())
}

/// Cross-checks every record must satisfy, also replayed on cache loads:
/// betti agrees with the u = v = 1 specialization, the polynomial is
/// symmetric in u and v, and all coefficients are positive.
pub fn validate_record(r: &ResultRecord) -> Result<()> {
    if r.level.is_some() {
        if r.betti.len() != r.n + 1 {
            return Err(Error::invalid(format!(
                "betti vector has length {}, expected {}",
                r.betti.len(),
                r.n + 1
            )));
        }
    }
    let expected_len = r.betti.len();
    let mut by_t: Vec<BigInt> = vec![BigInt::zero(); expected_len];
    let mut terms: BTreeMap<(usize, usize, usize), BigInt> = BTreeMap::new();
    for &(t, u, v, ref c) in &r.poincare_serre {
        if !c.is_positive() {
            return Err(Error::invalid(format!(
                "non-positive coefficient at t^{t} u^{u} v^{v}"
            )));
        }
        if t >= expected_len {
            return Err(Error::invalid(format!(
                "term t^{t} beyond the reported degree range"
            )));
        }
        by_t[t] += c;
        if terms.insert((t, u, v), c.clone()).is_some() {
            return Err(Error::invalid(format!(
                "duplicate term t^{t} u^{u} v^{v}"
            )));
        }
    }
    if by_t != r.betti {
        return Err(Error::invalid(format!(
            "u = v = 1 specialization {by_t:?} differs from betti {:?}",
            r.betti
        )));
    }
    for (&(t, u, v), c) in &terms {
        if terms.get(&(t, v, u)) != Some(c) {
            return Err(Error::invalid(format!(
                "mixed Hodge polynomial is not u/v symmetric at t^{t} u^{u} v^{v}"
            )));
        }
    }
    if let Some(eq) = &r.equivariant {
        // the trivial-weighted sum of irreducible polynomials must rebuild
        // the plain polynomial: sum_lambda dim(lambda) * P_lambda = P
        let mut rebuilt: BTreeMap<(usize, usize, usize), BigInt> = BTreeMap::new();
        for (label, poly) in eq {
            let lambda = parse_partition(label)?;
            if lambda.iter().sum::<usize>() != r.n {
                return Err(Error::invalid(format!(
                    "equivariant key {label} is not a partition of {}",
                    r.n
                )));
            }
            let dim = crate::repring::ClassFunction::irreducible(r.n, &lambda).dim();
            let dim = rat_to_bigint(&dim, "irreducible dimension")?;
            for &(t, u, v, ref c) in poly {
                if !c.is_positive() {
                    return Err(Error::invalid(format!(
                        "non-positive equivariant coefficient for {label}"
                    )));
                }
                *rebuilt.entry((t, u, v)).or_default() += c * &dim;
            }
        }
        if rebuilt != terms {
            return Err(Error::invalid(
                "equivariant decomposition does not add up to the plain polynomial",
            ));
        }
    }
    Ok(())
}

fn parse_partition(label: &str) -> Result<Vec<usize>> {
    if label == "e" {
        return Ok(Vec::new());
    }
    label
        .split('+')
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad partition label {label}")))
        })
        .collect()
}

fn identity_class(n: usize) -> Vec<usize> {
    vec![1; n]
}

/// Full moduli computation: Betti numbers, mixed Hodge polynomial and, on
/// request, its irreducible decomposition.
pub fn moduli_record(n: usize, level: u32, equivariant: bool) -> Result<ResultRecord> {
    let start = Instant::now();
    let b = betti(n, level)?;
    let poly = moduli_poly(n, level, equivariant)?;
    let serre = class_terms(&poly, &identity_class(n), "mixed Hodge coefficient")?;
    let eq = if equivariant {
        Some(decompose_poly(&poly)?)
    } else {
        None
    };
    let record = ResultRecord {
        n,
        level: Some(level),
        betti: b.into_iter().map(BigInt::from).collect(),
        poincare_serre: serre,
        equivariant: eq,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            basis_hash: basis_hash(n),
            elapsed_ms: start.elapsed().as_millis(),
        },
    };
    validate_record(&record)?;
    Ok(record)
}

/// Configuration-space record for F(E, n): Poincare numbers of the model
/// and the mixed Hodge polynomial with weight p + 2q per block.
pub fn config_record(n: usize, equivariant: bool) -> Result<ResultRecord> {
    if n == 0 {
        return Err(Error::invalid("need at least one marked point"));
    }
    let start = Instant::now();
    let poly = config_poly(n, equivariant)?;
    let serre = class_terms(&poly, &identity_class(n), "mixed Hodge coefficient")?;
    // independent dimension route fixes the degree range
    let dims = cohomology::dim_tables(n)?.poincare(Space::H);
    let mut b = vec![BigInt::zero(); dims.len()];
    for &(t, _, _, ref c) in &serre {
        if t >= b.len() {
            return Err(Error::BrokenComplex(format!(
                "configuration class in degree {t} beyond the model range"
            )));
        }
        b[t] += c;
    }
    for (m, &d) in dims.iter().enumerate() {
        if b[m] != BigInt::from(d) {
            return Err(Error::MultiplicityMismatch(format!(
                "configuration Poincare number in degree {m} disagrees with the rank route"
            )));
        }
    }
    let eq = if equivariant {
        Some(decompose_poly(&poly)?)
    } else {
        None
    };
    let record = ResultRecord {
        n,
        level: None,
        betti: b,
        poincare_serre: serre,
        equivariant: eq,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            basis_hash: basis_hash(n),
            elapsed_ms: start.elapsed().as_millis(),
        },
    };
    validate_record(&record)?;
    Ok(record)
}

// Serialization. All integers are emitted as decimal strings.

fn terms_to_json(terms: &[(usize, usize, usize, BigInt)]) -> serde_json::Value {
    serde_json::Value::Array(
        terms
            .iter()
            .map(|(t, u, v, c)| {
                serde_json::Value::Array(vec![
                    serde_json::Value::String(t.to_string()),
                    serde_json::Value::String(u.to_string()),
                    serde_json::Value::String(v.to_string()),
                    serde_json::Value::String(c.to_string()),
                ])
            })
            .collect(),
    )
}

pub fn to_json(r: &ResultRecord) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "n".to_string(),
        serde_json::Value::String(r.n.to_string()),
    );
    if let Some(level) = r.level {
        root.insert(
            "level".to_string(),
            serde_json::Value::String(level.to_string()),
        );
    }
    root.insert(
        "betti".to_string(),
        serde_json::Value::Array(
            r.betti
                .iter()
                .map(|b| serde_json::Value::String(b.to_string()))
                .collect(),
        ),
    );
    root.insert("poincare_serre".to_string(), terms_to_json(&r.poincare_serre));
    if let Some(eq) = &r.equivariant {
        let mut m = serde_json::Map::new();
        for (label, terms) in eq {
            m.insert(label.clone(), terms_to_json(terms));
        }
        root.insert("equivariant".to_string(), serde_json::Value::Object(m));
    }
    let mut meta = serde_json::Map::new();
    meta.insert(
        "version".to_string(),
        serde_json::Value::String(r.meta.version.clone()),
    );
    meta.insert(
        "basis_hash".to_string(),
        serde_json::Value::String(r.meta.basis_hash.clone()),
    );
    meta.insert(
        "elapsed_ms".to_string(),
        serde_json::Value::String(r.meta.elapsed_ms.to_string()),
    );
    root.insert("meta".to_string(), serde_json::Value::Object(meta));
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .expect("maps and strings always serialize");
    text.push('\n');
    text
}

fn json_usize(v: &serde_json::Value, what: &str) -> Result<usize> {
    v.as_str()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::invalid(format!("bad {what} in record")))
}

fn json_bigint(v: &serde_json::Value, what: &str) -> Result<BigInt> {
    v.as_str()
        .and_then(|s| s.parse::<BigInt>().ok())
        .ok_or_else(|| Error::invalid(format!("bad {what} in record")))
}

fn json_terms(v: &serde_json::Value, what: &str) -> Result<Vec<(usize, usize, usize, BigInt)>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::invalid(format!("{what} is not a list")))?;
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let quad = item
            .as_array()
            .filter(|a| a.len() == 4)
            .ok_or_else(|| Error::invalid(format!("{what} term is not a quadruple")))?;
        out.push((
            json_usize(&quad[0], "t degree")?,
            json_usize(&quad[1], "u degree")?,
            json_usize(&quad[2], "v degree")?,
            json_bigint(&quad[3], "coefficient")?,
        ));
    }
    Ok(out)
}

pub fn from_json(text: &str) -> Result<ResultRecord> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("record is not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::invalid("record is not a JSON object"))?;
    let n = json_usize(
        obj.get("n").ok_or_else(|| Error::invalid("record lacks n"))?,
        "n",
    )?;
    let level = match obj.get("level") {
        Some(v) => Some(json_usize(v, "level")? as u32),
        None => None,
    };
    let betti = obj
        .get("betti")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::invalid("record lacks betti"))?
        .iter()
        .map(|v| json_bigint(v, "betti entry"))
        .collect::<Result<Vec<_>>>()?;
    let poincare_serre = json_terms(
        obj.get("poincare_serre")
            .ok_or_else(|| Error::invalid("record lacks poincare_serre"))?,
        "poincare_serre",
    )?;
    let equivariant = match obj.get("equivariant") {
        Some(v) => {
            let m = v
                .as_object()
                .ok_or_else(|| Error::invalid("equivariant is not a map"))?;
            let mut out = BTreeMap::new();
            for (label, terms) in m {
                out.insert(label.clone(), json_terms(terms, "equivariant terms")?);
            }
            Some(out)
        }
        None => None,
    };
    let meta = obj
        .get("meta")
        .and_then(|v| v.as_object())
        .ok_or_else(|| Error::invalid("record lacks meta"))?;
    let get_meta = |key: &str| -> Result<String> {
        meta.get(key)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| Error::invalid(format!("record lacks meta.{key}")))
    };
    let elapsed_ms = get_meta("elapsed_ms")?
        .parse::<u128>()
        .map_err(|_| Error::invalid("bad meta.elapsed_ms"))?;
    Ok(ResultRecord {
        n,
        level,
        betti,
        poincare_serre,
        equivariant,
        meta: Meta {
            version: get_meta("version")?,
            basis_hash: get_meta("basis_hash")?,
            elapsed_ms,
        },
    })
}

pub fn to_csv(r: &ResultRecord) -> String {
    let mut out = String::from("section,t,u,v,value\n");
    for (m, b) in r.betti.iter().enumerate() {
        out.push_str(&format!("betti,{m},,,{b}\n"));
    }
    for (t, u, v, c) in &r.poincare_serre {
        out.push_str(&format!("poincare_serre,{t},{u},{v},{c}\n"));
    }
    if let Some(eq) = &r.equivariant {
        for (label, terms) in eq {
            for (t, u, v, c) in terms {
                out.push_str(&format!("equivariant {label},{t},{u},{v},{c}\n"));
            }
        }
    }
    out
}

fn latex_monomial(u: usize, v: usize, c: &BigInt) -> String {
    let mut parts = Vec::new();
    if *c != BigInt::one() || (u == 0 && v == 0) {
        parts.push(c.to_string());
    }
    match u {
        0 => {}
        1 => parts.push("u".to_string()),
        _ => parts.push(format!("u^{{{u}}}")),
    }
    match v {
        0 => {}
        1 => parts.push("v".to_string()),
        _ => parts.push(format!("v^{{{v}}}")),
    }
    parts.join(" ")
}

/// One table row per degree: Betti number and that degree's Hodge terms.
pub fn to_latex(r: &ResultRecord) -> String {
    let mut out = String::new();
    out.push_str("\\begin{tabular}{rrl}\n");
    out.push_str("degree & Betti & mixed Hodge terms \\\\\n\\hline\n");
    for (m, b) in r.betti.iter().enumerate() {
        let terms: Vec<String> = r
            .poincare_serre
            .iter()
            .filter(|&&(t, _, _, _)| t == m)
            .map(|(_, u, v, c)| latex_monomial(*u, *v, c))
            .collect();
        let body = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        out.push_str(&format!("{m} & {b} & ${body}$ \\\\\n"));
    }
    out.push_str("\\end{tabular}\n");
    out
}

// Result cache: JSON artifacts keyed by input and basis layout, written
// atomically under an advisory lock. Any cache problem falls back to a
// fresh computation.

fn cache_root() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("ELLCOH_CACHE_DIR") {
        if !dir.is_empty() {
            return Some(PathBuf::from(dir));
        }
    }
    if let Ok(dir) = std::env::var("XDG_CACHE_HOME") {
        if !dir.is_empty() {
            return Some(PathBuf::from(dir).join("ellcoh"));
        }
    }
    std::env::var("HOME")
        .ok()
        .filter(|h| !h.is_empty())
        .map(|h| PathBuf::from(h).join(".cache").join("ellcoh"))
}

#[cfg(unix)]
fn lock_exclusive(file: &std::fs::File) {
    use std::os::unix::io::AsRawFd;
    // advisory; released when the file handle closes
    unsafe {
        libc::flock(file.as_raw_fd(), libc::LOCK_EX);
    }
}

#[cfg(not(unix))]
fn lock_exclusive(_file: &std::fs::File) {}

fn write_cache_entry(key: &str, text: &str) -> std::io::Result<()> {
    let Some(root) = cache_root() else {
        return Ok(());
    };
    std::fs::create_dir_all(&root)?;
    let lock_path = root.join(format!("{key}.lock"));
    let lock_file = std::fs::OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)?;
    lock_exclusive(&lock_file);
    let tmp = root.join(format!("{key}.tmp"));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, root.join(key))?;
    Ok(())
}

fn cache_key(kind: &str, n: usize, level: Option<u32>, equivariant: bool, hash: &str) -> String {
    let level_part = level.map(|l| format!("-N{l}")).unwrap_or_default();
    let eq_part = if equivariant { "-eq" } else { "" };
    format!(
        "{kind}-n{n}{level_part}{eq_part}-v{}-{hash}.json",
        env!("CARGO_PKG_VERSION")
    )
}

fn load_cache_entry(
    key: &str,
    n: usize,
    level: Option<u32>,
    equivariant: bool,
    hash: &str,
) -> Option<String> {
    let root = cache_root()?;
    let path = root.join(key);
    let text = std::fs::read_to_string(&path).ok()?;
    let ok = from_json(&text)
        .and_then(|r| {
            validate_record(&r)?;
            if r.n == n
                && r.level == level
                && r.equivariant.is_some() == equivariant
                && r.meta.version == env!("CARGO_PKG_VERSION")
                && r.meta.basis_hash == hash
            {
                Ok(())
            } else {
                Err(Error::invalid("cache entry does not match the request"))
            }
        })
        .is_ok();
    if ok {
        Some(text)
    } else {
        eprintln!(
            "warning: ignoring invalid cache entry {}, recomputing",
            path.display()
        );
        None
    }
}

/// Moduli JSON with caching: a valid cache entry is returned verbatim, so
/// repeated runs are byte-identical.
pub fn moduli_json_cached(n: usize, level: u32, equivariant: bool) -> Result<String> {
    let hash = basis_hash(n);
    let key = cache_key("moduli", n, Some(level), equivariant, &hash);
    if let Some(text) = load_cache_entry(&key, n, Some(level), equivariant, &hash) {
        return Ok(text);
    }
    let record = moduli_record(n, level, equivariant)?;
    let text = to_json(&record);
    if let Err(e) = write_cache_entry(&key, &text) {
        eprintln!("warning: cache write failed ({e}), continuing without cache");
    }
    Ok(text)
}

/// Configuration-space JSON with the same caching contract.
pub fn config_json_cached(n: usize, equivariant: bool) -> Result<String> {
    let hash = basis_hash(n);
    let key = cache_key("config", n, None, equivariant, &hash);
    if let Some(text) = load_cache_entry(&key, n, None, equivariant, &hash) {
        return Ok(text);
    }
    let record = config_record(n, equivariant)?;
    let text = to_json(&record);
    if let Err(e) = write_cache_entry(&key, &text) {
        eprintln!("warning: cache write failed ({e}), continuing without cache");
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn betti_usize(r: &[BigInt]) -> Vec<usize> {
        r.iter().map(|b| b.to_string().parse().unwrap()).collect()
    }

    #[test]
    fn punctured_torus_betti() {
        assert_eq!(betti(1, 3).unwrap(), vec![1, 3]);
        assert_eq!(betti(1, 4).unwrap(), vec![1, 5]);
        assert_eq!(betti(1, 5).unwrap(), vec![1, 11]);
        assert_eq!(betti(2, 1).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn one_point_level_three_hodge_polynomial() {
        let record = moduli_record(1, 3, false).unwrap();
        assert_eq!(betti_usize(&record.betti), vec![1, 3]);
        assert_eq!(
            record.poincare_serre,
            vec![
                (0, 0, 0, BigInt::from(1)),
                (1, 1, 1, BigInt::from(3)),
            ]
        );
        let trivial = moduli_record(1, 1, false).unwrap();
        assert_eq!(trivial.poincare_serre, vec![(0, 0, 0, BigInt::from(1))]);
    }

    #[test]
    fn specialization_matches_betti_across_levels() {
        for n in 1usize..=3 {
            for level in 1u32..=4 {
                let record = moduli_record(n, level, false).unwrap();
                assert_eq!(
                    betti_usize(&record.betti),
                    betti(n, level).unwrap(),
                    "n={n} level={level}"
                );
            }
        }
    }

    #[test]
    fn route_agreement_with_group_cohomology() {
        for n in 1usize..=3 {
            let direct = crate::gamma::prelim_route(n).unwrap();
            assert_eq!(betti(n, 1).unwrap(), direct, "level 1 routes at n={n}");
        }
        // level 2: column 1 against the free-cocycle oracle
        let pres = crate::gamma::builtin_presentation(2).unwrap();
        for n in 1usize..=3 {
            let page = assemble_e2(n, 2).unwrap();
            let mults = cohomology::dim_tables(n)
                .unwrap()
                .multiplicities(Space::B)
                .unwrap();
            for d in 0..n {
                let by_cocycles: usize = (0..=mults.max_k())
                    .map(|k| {
                        mults.by_degree(d, k) * crate::gamma::h1_dim(&pres, k).unwrap()
                    })
                    .sum();
                assert_eq!(page.column1_dim(d), by_cocycles, "n={n} degree {d}");
            }
        }
    }

    #[test]
    fn config_records_match_frozen_polynomials() {
        let r2 = config_record(2, false).unwrap();
        assert_eq!(betti_usize(&r2.betti), vec![1, 4, 5, 2]);
        let r1 = config_record(1, false).unwrap();
        assert_eq!(
            r1.poincare_serre,
            vec![
                (0, 0, 0, BigInt::from(1)),
                (1, 0, 1, BigInt::from(1)),
                (1, 1, 0, BigInt::from(1)),
                (2, 1, 1, BigInt::from(1)),
            ]
        );
    }

    #[test]
    fn equivariant_records_are_consistent() {
        let record = moduli_record(3, 2, true).unwrap();
        let eq = record.equivariant.as_ref().unwrap();
        assert!(eq.contains_key("3"), "trivial representation present");
        // validated internally: weighted sum equals the plain polynomial
        let plain = moduli_record(3, 2, false).unwrap();
        assert_eq!(record.poincare_serre, plain.poincare_serre);
        let config = config_record(2, true).unwrap();
        let ceq = config.equivariant.as_ref().unwrap();
        let deg0: Vec<_> = ceq["2"].iter().filter(|t| t.0 == 0).collect();
        assert_eq!(deg0, vec![&(0usize, 0usize, 0usize, BigInt::from(1))]);
    }

    #[test]
    fn json_round_trip_and_formats() {
        let record = moduli_record(2, 3, true).unwrap();
        let text = to_json(&record);
        let parsed = from_json(&text).unwrap();
        assert_eq!(parsed, record);
        assert_eq!(to_json(&parsed), text);
        let csv = to_csv(&record);
        assert!(csv.starts_with("section,t,u,v,value\n"));
        assert!(csv.contains("betti,0,,,1\n"));
        let latex = to_latex(&record);
        assert_eq!(latex.matches("\\\\\n").count(), record.betti.len() + 1);
    }

    #[test]
    fn cache_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var("ELLCOH_CACHE_DIR", dir.path());
        let cold = moduli_json_cached(1, 3, false).unwrap();
        let warm = moduli_json_cached(1, 3, false).unwrap();
        assert_eq!(cold, warm);
        // corrupt the entry: it must be ignored and recomputed
        let key = cache_key("moduli", 1, Some(3), false, &basis_hash(1));
        std::fs::write(dir.path().join(&key), "{ not json").unwrap();
        let again = moduli_json_cached(1, 3, false).unwrap();
        let reparsed = from_json(&again).unwrap();
        assert_eq!(reparsed.n, 1);
        std::env::remove_var("ELLCOH_CACHE_DIR");
    }
}
