//! Built-in consistency suite: every structural identity the model must
//! satisfy, checked end to end at runtime. Used by the CLI selftest command.

use crate::arith::rat_i64;
use crate::assemble;
use crate::cohomology::{self, Space};
use crate::error::Result;
use crate::forest;
use crate::gamma;
use crate::modular;
use crate::repring::Poly3;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn report(name: &str, outcome: Result<String>) -> CheckReport {
    match outcome {
        Ok(detail) => CheckReport {
            name: name.to_string(),
            passed: true,
            detail,
        },
        Err(e) => CheckReport {
            name: name.to_string(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn fail(msg: String) -> crate::error::Error {
    crate::error::Error::invalid(msg)
}

fn check_algebra_dims() -> Result<String> {
    for n in 1..=8usize {
        let total = forest::dim_total(n);
        let closed = forest::dim_closed_form(n);
        if total != closed {
            return Err(fail(format!(
                "algebra dimension at n={n}: counted {total}, closed form {closed}"
            )));
        }
    }
    Ok("graded dimensions match the closed form for n <= 8".to_string())
}

fn check_euler_and_splitting(nmax: usize) -> Result<String> {
    let top = nmax.clamp(1, 6);
    for n in 1..=top {
        let dims = cohomology::dim_tables(n)?;
        let h = dims.poincare(Space::H);
        let b = dims.poincare(Space::B);
        let euler_h: i64 = h
            .iter()
            .enumerate()
            .map(|(m, &d)| if m % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        if euler_h != 0 {
            return Err(fail(format!(
                "configuration Euler characteristic at n={n} is {euler_h}, expected 0"
            )));
        }
        let euler_b: i64 = b
            .iter()
            .enumerate()
            .map(|(m, &d)| if m % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        let sign = if (n - 1) % 2 == 0 { 1 } else { -1 };
        let expect = BigInt::from(sign) * crate::partitions::factorial(n - 1);
        if BigInt::from(euler_b) != expect {
            return Err(fail(format!(
                "reduced Euler characteristic at n={n} is {euler_b}, expected {expect}"
            )));
        }
        // four-term splitting of every graded block
        let hm = dims.multiplicities(Space::H)?;
        let bm = dims.multiplicities(Space::B)?;
        let mut keys: std::collections::BTreeSet<(usize, usize, i64)> =
            hm.m.keys().map(|&(p, q, k)| (p, q, k as i64)).collect();
        for &(p, q, k) in bm.m.keys() {
            keys.insert((p, q, k as i64));
            keys.insert((p + 1, q, k as i64 + 1));
            if k > 0 {
                keys.insert((p + 1, q, k as i64 - 1));
            }
            keys.insert((p + 2, q, k as i64));
        }
        let bdim = |p: i64, q: i64, k: i64| -> usize {
            if p < 0 || q < 0 || k < 0 {
                0
            } else {
                bm.m.get(&(p as usize, q as usize, k as usize))
                    .copied()
                    .unwrap_or(0)
            }
        };
        for (p, q, k) in keys {
            let lhs = hm.m.get(&(p, q, k as usize)).copied().unwrap_or(0);
            let rhs = bdim(p as i64, q as i64, k)
                + bdim(p as i64 - 1, q as i64, k - 1)
                + bdim(p as i64 - 1, q as i64, k + 1)
                + bdim(p as i64 - 2, q as i64, k);
            if lhs != rhs {
                return Err(fail(format!(
                    "splitting identity fails at n={n} (p={p}, q={q}, k={k}): {lhs} vs {rhs}"
                )));
            }
        }
    }
    Ok(format!(
        "Euler characteristics and block splitting verified for n <= {top}"
    ))
}

fn check_exact_vs_rank(nmax: usize) -> Result<String> {
    let top = nmax.clamp(1, 4);
    for n in 1..=top {
        let exact = cohomology::tables(n)?;
        let ranked = cohomology::dim_tables(n)?;
        for space in [Space::H, Space::B] {
            let a = exact.multiplicities(space)?;
            let b = ranked.multiplicities(space)?;
            if a.m != b.m {
                return Err(fail(format!(
                    "exact and rank multiplicity tables differ at n={n}"
                )));
            }
        }
    }
    Ok(format!("exact and rank routes agree for n <= {top}"))
}

fn check_modular_identities() -> Result<String> {
    for level in 1..=12u64 {
        let gd = modular::gamma_data(level)?;
        for k in 0..=20u64 {
            let w = modular::w_dims(k, level)?;
            if w.total != w.w_low + w.w_high {
                return Err(fail(format!(
                    "weight splitting broken at k={k}, N={level}"
                )));
            }
            if level == 2 && k % 2 == 1 {
                // -Id acts by -1, so odd-weight forms vanish
                if w.total != 0 {
                    return Err(fail(format!(
                        "odd-weight forms at N=2 should vanish, k={k}"
                    )));
                }
            } else if level >= 2 {
                let expect = (gd.mu_bar as i64 / 6) * (k as i64 + 1) + i64::from(k == 0);
                if w.total != expect {
                    return Err(fail(format!(
                        "free-rank identity fails at k={k}, N={level}: {} vs {expect}",
                        w.total
                    )));
                }
            }
        }
    }
    Ok("automorphic dimension identities hold for N <= 12, k <= 20".to_string())
}

fn check_group_cohomology() -> Result<String> {
    for level in 2..=5u32 {
        let pres = gamma::builtin_presentation(level)?;
        for k in 0..=10usize {
            let h1 = gamma::h1_dim(&pres, k)?;
            let par = gamma::parabolic_h1_dim(&pres, k)?;
            let w = modular::w_dims(k as u64, level as u64)?;
            if h1 as i64 != w.total {
                return Err(fail(format!(
                    "free-cocycle H1 at N={level}, k={k}: {h1} vs {}",
                    w.total
                )));
            }
            if par as i64 != w.w_low {
                return Err(fail(format!(
                    "parabolic H1 at N={level}, k={k}: {par} vs {}",
                    w.w_low
                )));
            }
        }
    }
    Ok("group cohomology matches modular dimensions for N in 2..=5, k <= 10".to_string())
}

fn check_amalgam() -> Result<String> {
    for k in 0..=14usize {
        let h1 = gamma::amalgam_h1_vk(k)?;
        let w = modular::w_dims(k as u64, 1)?;
        if h1 as i64 != w.total {
            return Err(fail(format!(
                "amalgam H1 at k={k}: {h1} vs {}",
                w.total
            )));
        }
    }
    Ok("amalgam H1 matches level-1 modular dimensions for k <= 14".to_string())
}

fn check_route_agreement(nmax: usize) -> Result<String> {
    let top = nmax.clamp(1, 4);
    for n in 1..=top {
        let direct = gamma::prelim_route(n)?;
        let assembled = assemble::betti(n, 1)?;
        if direct != assembled {
            return Err(fail(format!(
                "level-1 Betti routes disagree at n={n}: {assembled:?} vs {direct:?}"
            )));
        }
    }
    // level 2 column check through an explicit presentation
    let pres = gamma::builtin_presentation(2)?;
    for n in 1..=top.min(3) {
        let page = assemble::assemble_e2(n, 2)?;
        let mults = cohomology::dim_tables(n)?.multiplicities(Space::B)?;
        for d in 0..n {
            let by_cocycles: usize = (0..=mults.max_k())
                .map(|k| Ok(mults.by_degree(d, k) * gamma::h1_dim(&pres, k)?))
                .sum::<Result<usize>>()?;
            if page.column1_dim(d) != by_cocycles {
                return Err(fail(format!(
                    "level-2 column mismatch at n={n}, degree {d}"
                )));
            }
        }
    }
    Ok(format!(
        "spectral and group-cohomology routes agree for n <= {top}"
    ))
}

fn poly_checks(poly: &Poly3, betti: &[usize], label: &str) -> Result<()> {
    let mut by_t = vec![rat_i64(0); betti.len()];
    for (&(t, _, _), cf) in &poly.coeffs {
        if t >= by_t.len() {
            return Err(fail(format!("{label}: term beyond degree range")));
        }
        by_t[t] += cf.dim();
    }
    let expect: Vec<_> = betti.iter().map(|&b| rat_i64(b as i64)).collect();
    if by_t != expect {
        return Err(fail(format!(
            "{label}: u = v = 1 specialization does not match Betti numbers"
        )));
    }
    let swapped = poly.swap_uv();
    if swapped.coeffs.len() != poly.coeffs.len()
        || swapped
            .coeffs
            .iter()
            .any(|(k, cf)| poly.coeffs.get(k) != Some(cf))
    {
        return Err(fail(format!("{label}: polynomial is not u/v symmetric")));
    }
    Ok(())
}

fn check_hodge_polynomials(nmax: usize) -> Result<String> {
    let top = nmax.clamp(1, 5);
    for n in 1..=top {
        for level in 1..=5u32 {
            let poly = assemble::moduli_poly(n, level, false)?;
            let betti = assemble::betti(n, level)?;
            poly_checks(&poly, &betti, &format!("moduli n={n} N={level}"))?;
        }
    }
    Ok(format!(
        "mixed Hodge polynomials specialize correctly for n <= {top}, N <= 5"
    ))
}

fn check_one_point_levels() -> Result<String> {
    for level in 3..=8u32 {
        let gd = modular::gamma_data(level as u64)?;
        let expect = vec![1usize, (gd.eps_inf + 2 * gd.genus - 1) as usize];
        let got = assemble::betti(1, level)?;
        if got != expect {
            return Err(fail(format!(
                "one-point Betti numbers at N={level}: {got:?} vs {expect:?}"
            )));
        }
    }
    Ok("one-point Betti numbers match curve invariants for N in 3..=8".to_string())
}

fn check_equivariant(nmax: usize) -> Result<String> {
    let top = nmax.clamp(1, 4);
    for n in 1..=top {
        let record = assemble::moduli_record(n, 2, true)?;
        let eq = record
            .equivariant
            .as_ref()
            .ok_or_else(|| fail("equivariant data missing".to_string()))?;
        for (label, terms) in eq {
            for &(_, _, _, ref c) in terms {
                if c <= &BigInt::zero() {
                    return Err(fail(format!(
                        "non-positive multiplicity for {label} at n={n}"
                    )));
                }
            }
        }
    }
    Ok(format!(
        "equivariant decompositions are non-negative integers for n <= {top}"
    ))
}

/// Run the whole suite. nmax bounds the most expensive point counts.
pub fn run(nmax: usize) -> Vec<CheckReport> {
    vec![
        report("algebra-dims", check_algebra_dims()),
        report("euler-splitting", check_euler_and_splitting(nmax)),
        report("exact-vs-rank", check_exact_vs_rank(nmax)),
        report("modular-identities", check_modular_identities()),
        report("group-cohomology", check_group_cohomology()),
        report("amalgam", check_amalgam()),
        report("route-agreement", check_route_agreement(nmax)),
        report("hodge-polynomials", check_hodge_polynomials(nmax)),
        report("one-point-levels", check_one_point_levels()),
        report("equivariant", check_equivariant(nmax)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let reports = run(3);
        for r in &reports {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert_eq!(reports.len(), 10);
    }
}
