//! Representation-ring arithmetic.
//!
//! Coefficients live in the Grothendieck group of S_n-modules, stored as
//! class functions (values on cycle types). A plain dimension count is the
//! special case of a class function supported on the identity class, so the
//! equivariant and non-equivariant pipelines share one code path.
//!
//! On top of that sit vectors of SL2-irreducibles [V_k] and polynomials in
//! t, u, v. Each [V_k] carries its natural weight k; Tate twists are tracked
//! by (uv)-powers, so tensoring with [V_1] follows the twisted Clebsch-Gordan
//! rule [V_1][V_k] = [V_{k+1}] + uv [V_{k-1}].

use crate::arith::{rat_i64, Rat};
use crate::error::{Error, Result};
use crate::partitions::{class_size, factorial, partitions};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Value of the irreducible character chi^lambda on the class of cycle type
/// mu, by the Murnaghan-Nakayama rule in beta-number (abacus) form.
pub fn mn_character(lambda: &[usize], mu: &[usize]) -> i64 {
    let nl: usize = lambda.iter().sum();
    let nm: usize = mu.iter().sum();
    assert_eq!(nl, nm, "partition sizes differ");
    fn rec(betas: &[usize], mu: &[usize]) -> i64 {
        let Some((&r, rest)) = mu.split_first() else {
            return 1;
        };
        let mut total = 0i64;
        for (i, &b) in betas.iter().enumerate() {
            if b < r {
                continue;
            }
            let t = b - r;
            if betas.contains(&t) {
                continue;
            }
            let passed = betas.iter().filter(|&&x| t < x && x < b).count();
            let sign = if passed % 2 == 0 { 1 } else { -1 };
            let mut next: Vec<usize> = betas
                .iter()
                .enumerate()
                .map(|(j, &x)| if j == i { t } else { x })
                .collect();
            next.sort_unstable_by(|a, b| b.cmp(a));
            total += sign * rec(&next, rest);
        }
        total
    }
    let m = lambda.len();
    let betas: Vec<usize> = lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| l + (m - 1 - i))
        .collect();
    rec(&betas, mu)
}

/// A class function on S_n: one rational value per cycle type, zero values
/// not stored. A bare dimension is represented by its value on the identity
/// class alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    pub n: usize,
    values: BTreeMap<Vec<usize>, Rat>,
}

impl ClassFunction {
    pub fn zero(n: usize) -> Self {
        ClassFunction {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn from_dim(n: usize, dim: i64) -> Self {
        let mut cf = ClassFunction::zero(n);
        cf.set(vec![1; n], rat_i64(dim));
        cf
    }

    /// The irreducible character chi^lambda as a class function.
    pub fn irreducible(n: usize, lambda: &[usize]) -> Self {
        let mut cf = ClassFunction::zero(n);
        for mu in partitions(n) {
            cf.set(mu.clone(), rat_i64(mn_character(lambda, &mu)));
        }
        cf
    }

    pub fn set(&mut self, cycle_type: Vec<usize>, v: Rat) {
        assert_eq!(cycle_type.iter().sum::<usize>(), self.n);
        if v.is_zero() {
            self.values.remove(&cycle_type);
        } else {
            self.values.insert(cycle_type, v);
        }
    }

    pub fn get(&self, cycle_type: &[usize]) -> Rat {
        self.values.get(cycle_type).cloned().unwrap_or_else(Rat::zero)
    }

    /// Value on the identity class, i.e. the dimension.
    pub fn dim(&self) -> Rat {
        self.get(&vec![1; self.n])
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Rat)> {
        self.values.iter()
    }

    pub fn add_assign(&mut self, other: &ClassFunction) {
        assert_eq!(self.n, other.n, "class functions on different groups");
        for (k, v) in &other.values {
            let cur = self.get(k) + v;
            self.set(k.clone(), cur);
        }
    }

    pub fn sub_assign(&mut self, other: &ClassFunction) {
        assert_eq!(self.n, other.n, "class functions on different groups");
        for (k, v) in &other.values {
            let cur = self.get(k) - v;
            self.set(k.clone(), cur);
        }
    }

    pub fn scaled(&self, c: &Rat) -> ClassFunction {
        let mut out = ClassFunction::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.values {
            out.values.insert(k.clone(), v * c);
        }
        out
    }

    /// Multiplicities <f, chi^lambda> via the class-equation inner product.
    pub fn decompose(&self) -> BTreeMap<Vec<usize>, Rat> {
        let order = Rat::from_integer(factorial(self.n));
        let mut out = BTreeMap::new();
        for lambda in partitions(self.n) {
            let mut acc = Rat::zero();
            for mu in partitions(self.n) {
                let chi = rat_i64(mn_character(&lambda, &mu));
                acc += Rat::from_integer(class_size(&mu)) * self.get(&mu) * chi;
            }
            let m = acc / &order;
            if !m.is_zero() {
                out.insert(lambda, m);
            }
        }
        out
    }

    /// Rebuild sum of m_lambda chi^lambda; inverse of decompose.
    pub fn from_multiplicities(n: usize, mults: &BTreeMap<Vec<usize>, Rat>) -> Self {
        let mut cf = ClassFunction::zero(n);
        for (lambda, m) in mults {
            cf.add_assign(&ClassFunction::irreducible(n, lambda).scaled(m));
        }
        cf
    }
}

/// A finitely supported vector of SL2-irreducibles with ClassFunction
/// coefficients: map k -> multiplicity of V_k.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sl2RepVector {
    pub mults: BTreeMap<usize, ClassFunction>,
}

impl Sl2RepVector {
    pub fn new() -> Self {
        Sl2RepVector::default()
    }

    pub fn single(k: usize, cf: ClassFunction) -> Self {
        let mut v = Sl2RepVector::new();
        v.add(k, &cf);
        v
    }

    pub fn add(&mut self, k: usize, cf: &ClassFunction) {
        if cf.is_zero() {
            return;
        }
        match self.mults.get_mut(&k) {
            Some(cur) => {
                cur.add_assign(cf);
                if cur.is_zero() {
                    self.mults.remove(&k);
                }
            }
            None => {
                self.mults.insert(k, cf.clone());
            }
        }
    }

    pub fn sub(&mut self, k: usize, cf: &ClassFunction) {
        self.add(k, &cf.scaled(&-rat_i64(1)));
    }

    pub fn is_zero(&self) -> bool {
        self.mults.is_empty()
    }

    /// Total dimension: sum of mult_k * (k+1) on the identity class.
    pub fn dim(&self) -> Rat {
        let mut d = Rat::zero();
        for (k, cf) in &self.mults {
            d += cf.dim() * rat_i64((k + 1) as i64);
        }
        d
    }

    /// Clebsch-Gordan tensoring with V_1 in plain R(SL2):
    /// [V_1][V_k] = [V_{k+1}] + [V_{k-1}].
    pub fn tensor_v1(&self) -> Sl2RepVector {
        let mut out = Sl2RepVector::new();
        for (k, cf) in &self.mults {
            out.add(k + 1, cf);
            if *k >= 1 {
                out.add(k - 1, cf);
            }
        }
        out
    }

    /// The [V_{k+1}] halves of tensoring with V_1 (no twist).
    pub fn shift_up(&self) -> Sl2RepVector {
        let mut out = Sl2RepVector::new();
        for (k, cf) in &self.mults {
            out.add(k + 1, cf);
        }
        out
    }

    /// The [V_{k-1}] halves of tensoring with V_1 (these carry the uv twist).
    pub fn shift_down(&self) -> Sl2RepVector {
        let mut out = Sl2RepVector::new();
        for (k, cf) in &self.mults {
            if *k >= 1 {
                out.add(k - 1, cf);
            }
        }
        out
    }
}

/// Polynomial in t, u, v with Sl2RepVector coefficients, indexed by
/// (t-degree, u-degree, v-degree).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepPoly {
    pub coeffs: BTreeMap<(usize, usize, usize), Sl2RepVector>,
}

impl RepPoly {
    pub fn new() -> Self {
        RepPoly::default()
    }

    pub fn add_term(&mut self, deg: (usize, usize, usize), k: usize, cf: &ClassFunction) {
        if cf.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(deg).or_default();
        entry.add(k, cf);
        if entry.is_zero() {
            self.coeffs.remove(&deg);
        }
    }

    pub fn add_vector(&mut self, deg: (usize, usize, usize), vec: &Sl2RepVector) {
        for (k, cf) in &vec.mults {
            self.add_term(deg, *k, cf);
        }
    }

    pub fn sub_vector(&mut self, deg: (usize, usize, usize), vec: &Sl2RepVector) {
        for (k, cf) in &vec.mults {
            let entry = self.coeffs.entry(deg).or_default();
            entry.sub(*k, cf);
            if entry.is_zero() {
                self.coeffs.remove(&deg);
            }
        }
    }

    pub fn get(&self, deg: (usize, usize, usize)) -> Sl2RepVector {
        self.coeffs.get(&deg).cloned().unwrap_or_default()
    }

    pub fn t_degree(&self) -> usize {
        self.coeffs.keys().map(|d| d.0).max().unwrap_or(0)
    }

    /// Multiply by the curve factor 1 + t[V_1] + uv t^2 with the twisted
    /// Clebsch-Gordan rule.
    pub fn mul_curve_factor(&self) -> RepPoly {
        let mut out = self.clone();
        for (&(t, u, v), vec) in &self.coeffs {
            out.add_vector((t + 1, u, v), &vec.shift_up());
            out.add_vector((t + 1, u + 1, v + 1), &vec.shift_down());
            out.add_vector((t + 2, u + 1, v + 1), vec);
        }
        out
    }

    /// Exact division by 1 + t[V_1] + uv t^2, ascending in t-degree.
    /// Any negative multiplicity along the way, or a failed multiply-back,
    /// is a hard error: it signals wrong multiplicities upstream.
    pub fn divide_by_curve_factor(&self) -> Result<RepPoly> {
        let tmax = self.t_degree();
        let degrees: Vec<(usize, usize, usize)> = {
            let mut ds: Vec<_> = self.coeffs.keys().cloned().collect();
            ds.sort();
            ds
        };
        let umax = degrees.iter().map(|d| d.1).max().unwrap_or(0);
        let vmax = degrees.iter().map(|d| d.2).max().unwrap_or(0);
        let mut h = RepPoly::new();
        for t in 0..=tmax {
            for u in 0..=umax {
                for v in 0..=vmax {
                    let mut vec = self.get((t, u, v));
                    if t >= 1 {
                        for (k, cf) in h.get((t - 1, u, v)).shift_up().mults {
                            vec.sub(k, &cf);
                        }
                        if u >= 1 && v >= 1 {
                            for (k, cf) in h.get((t - 1, u - 1, v - 1)).shift_down().mults {
                                vec.sub(k, &cf);
                            }
                        }
                    }
                    if t >= 2 && u >= 1 && v >= 1 {
                        for (k, cf) in h.get((t - 2, u - 1, v - 1)).mults {
                            vec.sub(k, &cf);
                        }
                    }
                    for (k, cf) in &vec.mults {
                        if cf.dim().is_negative() {
                            return Err(Error::NegativeMultiplicity(format!(
                                "quotient coefficient t^{t} u^{u} v^{v} [V_{k}]"
                            )));
                        }
                    }
                    if !vec.is_zero() {
                        h.coeffs.insert((t, u, v), vec);
                    }
                }
            }
        }
        let back = h.mul_curve_factor();
        if back != *self {
            return Err(Error::InexactDivision(
                "multiply-back by the curve factor does not reproduce the input".into(),
            ));
        }
        Ok(h)
    }

    /// Forget u, v and the S_n structure: dimensions by t-degree.
    pub fn dims_by_t(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.t_degree() + 1];
        for (&(t, _, _), vec) in &self.coeffs {
            out[t] += vec.dim();
        }
        out
    }
}

/// Hodge components of V_k: bidegrees (k, 0), (k-1, 1), ..., (0, k).
pub fn hodge_monomials(k: usize) -> Vec<(usize, usize)> {
    (0..=k).map(|j| (k - j, j)).collect()
}

/// Polynomial in t, u, v with plain ClassFunction coefficients (no [V_k]
/// content left); the carrier of final mixed Hodge polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly3 {
    pub coeffs: BTreeMap<(usize, usize, usize), ClassFunction>,
}

impl Poly3 {
    pub fn new() -> Self {
        Poly3::default()
    }

    pub fn add_term(&mut self, deg: (usize, usize, usize), cf: &ClassFunction) {
        if cf.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&deg) {
            Some(cur) => {
                cur.add_assign(cf);
                if cur.is_zero() {
                    self.coeffs.remove(&deg);
                }
            }
            None => {
                self.coeffs.insert(deg, cf.clone());
            }
        }
    }

    pub fn t_degree(&self) -> usize {
        self.coeffs.keys().map(|d| d.0).max().unwrap_or(0)
    }

    /// Specialize u = v = 1 and take dimensions: coefficients by t-degree.
    pub fn poincare(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.t_degree() + 1];
        for (&(t, _, _), cf) in &self.coeffs {
            out[t] += cf.dim();
        }
        out
    }

    /// Specialize v = u: map (t-degree, u-degree) -> dimension.
    pub fn serre(&self) -> BTreeMap<(usize, usize), Rat> {
        let mut out: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (&(t, u, v), cf) in &self.coeffs {
            let e = out.entry((t, u + v)).or_insert_with(Rat::zero);
            *e += cf.dim();
            if e.is_zero() {
                out.remove(&(t, u + v));
            }
        }
        out
    }

    /// Trace polynomial of one conjugacy class: map (t,u,v) -> value.
    pub fn class_polynomial(&self, cycle_type: &[usize]) -> BTreeMap<(usize, usize, usize), Rat> {
        let mut out = BTreeMap::new();
        for (&deg, cf) in &self.coeffs {
            let v = cf.get(cycle_type);
            if !v.is_zero() {
                out.insert(deg, v);
            }
        }
        out
    }

    /// Swap u and v; the pipeline output must be fixed by this.
    pub fn swap_uv(&self) -> Poly3 {
        let mut out = Poly3::new();
        for (&(t, u, v), cf) in &self.coeffs {
            out.add_term((t, v, u), cf);
        }
        out
    }

    /// Whether every stored value is an integer.
    pub fn is_integral(&self) -> bool {
        for cf in self.coeffs.values() {
            for (_, v) in cf.iter() {
                if !v.denom().is_one() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partition_string;
    use num_bigint::BigInt;

    fn dim_cf(d: i64) -> ClassFunction {
        ClassFunction::from_dim(1, d)
    }

    #[test]
    fn mn_small_values() {
        // trivial and sign representations
        for n in 1..=6 {
            for mu in partitions(n) {
                assert_eq!(mn_character(&[n], &mu), 1);
                let sign: i64 = mu.iter().map(|p| if (p - 1) % 2 == 0 { 1 } else { -1 }).product();
                assert_eq!(mn_character(&vec![1; n], &mu), sign);
            }
        }
        assert_eq!(mn_character(&[2, 1], &[3]), -1);
        assert_eq!(mn_character(&[2, 1], &[1, 1, 1]), 2);
        assert_eq!(mn_character(&[2, 1], &[2, 1]), 0);
    }

    #[test]
    fn mn_first_orthogonality_up_to_8() {
        for n in 1..=8 {
            let parts = partitions(n);
            let order = factorial(n);
            for la in &parts {
                for nu in &parts {
                    let mut acc = BigInt::from(0);
                    for mu in &parts {
                        acc += class_size(mu)
                            * BigInt::from(mn_character(la, mu))
                            * BigInt::from(mn_character(nu, mu));
                    }
                    let expect = if la == nu { order.clone() } else { BigInt::from(0) };
                    assert_eq!(acc, expect, "n={n} {la:?} {nu:?}");
                }
            }
        }
    }

    #[test]
    fn decompose_regular_character() {
        let mut reg = ClassFunction::zero(3);
        reg.set(vec![1, 1, 1], rat_i64(6));
        let mults = reg.decompose();
        let get = |p: &[usize]| mults.get(p).cloned().unwrap_or_else(Rat::zero);
        assert_eq!(get(&[3]), rat_i64(1));
        assert_eq!(get(&[2, 1]), rat_i64(2));
        assert_eq!(get(&[1, 1, 1]), rat_i64(1));
        let back = ClassFunction::from_multiplicities(3, &mults);
        assert_eq!(back, reg);
    }

    #[test]
    fn decompose_indicator_on_irreducible() {
        for lambda in partitions(4) {
            let cf = ClassFunction::irreducible(4, &lambda);
            let mults = cf.decompose();
            assert_eq!(mults.len(), 1);
            assert_eq!(mults.get(&lambda), Some(&rat_i64(1)));
        }
    }

    #[test]
    fn tensor_v1_rules() {
        let v0 = Sl2RepVector::single(0, dim_cf(1));
        let t = v0.tensor_v1();
        assert_eq!(t.mults.len(), 1);
        assert_eq!(t.mults[&1].dim(), rat_i64(1));

        let v1 = Sl2RepVector::single(1, dim_cf(1));
        let t = v1.tensor_v1();
        assert_eq!(t.mults.len(), 2);
        assert_eq!(t.dim(), rat_i64(4));
        assert_eq!(v1.dim() * rat_i64(2), t.dim());
    }

    #[test]
    fn divide_unit_curve_factor() {
        // P = 1 + t[V_1] + uv t^2 divides to 1
        let mut p = RepPoly::new();
        p.add_term((0, 0, 0), 0, &dim_cf(1));
        p.add_term((1, 0, 0), 1, &dim_cf(1));
        p.add_term((2, 1, 1), 0, &dim_cf(1));
        let h = p.divide_by_curve_factor().unwrap();
        assert_eq!(h.coeffs.len(), 1);
        assert_eq!(h.get((0, 0, 0)).mults[&0].dim(), rat_i64(1));
    }

    #[test]
    fn divide_round_trips() {
        let mut h = RepPoly::new();
        h.add_term((0, 0, 0), 0, &dim_cf(1));
        h.add_term((1, 1, 1), 1, &dim_cf(2));
        h.add_term((2, 1, 1), 2, &dim_cf(1));
        h.add_term((3, 2, 2), 0, &dim_cf(5));
        let p = h.mul_curve_factor();
        let q = p.divide_by_curve_factor().unwrap();
        assert_eq!(q, h);
    }

    #[test]
    fn divide_rejects_non_multiple() {
        let mut p = RepPoly::new();
        p.add_term((0, 0, 0), 0, &dim_cf(1));
        p.add_term((1, 0, 0), 0, &dim_cf(1));
        assert!(p.divide_by_curve_factor().is_err());
    }

    #[test]
    fn poly3_specializations() {
        let mut p = Poly3::new();
        p.add_term((0, 0, 0), &dim_cf(1));
        p.add_term((1, 1, 1), &dim_cf(3));
        assert_eq!(p.poincare(), vec![rat_i64(1), rat_i64(3)]);
        let serre = p.serre();
        assert_eq!(serre.get(&(1, 2)), Some(&rat_i64(3)));
        assert_eq!(p.swap_uv(), p);
        assert!(p.is_integral());
    }

    #[test]
    fn hodge_monomials_shape() {
        assert_eq!(hodge_monomials(0), vec![(0, 0)]);
        assert_eq!(hodge_monomials(2), vec![(2, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn partition_string_round_trip_keys() {
        let keys: Vec<String> = partitions(4).iter().map(|p| partition_string(p)).collect();
        assert!(keys.contains(&"2+1+1".to_string()));
        assert_eq!(keys.len(), 5);
    }
}
