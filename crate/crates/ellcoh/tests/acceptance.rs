//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line (visible with --nocapture). The numbering is stable.

use ellcoh::arith::{rat_i64, Rat};
use ellcoh::assemble;
use ellcoh::cohomology::{self, Space};
use ellcoh::forest::{
    self, act_matrix, act_perm, act_sl2, basis_table, block_basis, differential,
    AlgebraElement, GradedBlockIndex, Monomial, Sl2Gen,
};
use ellcoh::gamma;
use ellcoh::modular;
use ellcoh::partitions::partitions;
use ellcoh::repring::ClassFunction;
use num_traits::{One, Zero};
use std::time::Instant;

fn criterion(num: usize, what: &str, f: impl FnOnce() -> Result<String, String>) {
    match f() {
        Ok(detail) => println!("criterion {num:2} ({what}): PASS  {detail}"),
        Err(e) => {
            println!("criterion {num:2} ({what}): FAIL  {e}");
            panic!("criterion {num} ({what}) failed: {e}");
        }
    }
}

fn mono_element(n: usize, m: &Monomial) -> AlgebraElement {
    let mut x = AlgebraElement::zero(n);
    x.add_monomial(m.clone(), rat_i64(1));
    x
}

/// d squares to zero and commutes with every symmetry on each basis vector.
fn check_block(n: usize, monos: &[Monomial]) -> Result<(), String> {
    let fail = |m: &Monomial, what: &str| Err::<(), String>(format!("{what} fails on {m} at n={n}"));
    let mut perms: Vec<Vec<usize>> = vec![(0..n).map(|i| (i + 1) % n).collect()];
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        perms.push(swap);
    }
    let mats = [[[0i64, -1], [1, 0]], [[1, 1], [0, 1]]];
    for m in monos {
        let x = mono_element(n, m);
        let dx = differential(&x).map_err(|e| e.to_string())?;
        if !differential(&dx).map_err(|e| e.to_string())?.is_zero() {
            return fail(m, "d^2 = 0");
        }
        for op in [Sl2Gen::X, Sl2Gen::Y, Sl2Gen::H] {
            let a = act_sl2(op, &dx).map_err(|e| e.to_string())?;
            let b = differential(&act_sl2(op, &x).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut diff = a;
            diff.add_assign(&b.scaled(&rat_i64(-1)));
            if !diff.is_zero() {
                return fail(m, "sl2 equivariance");
            }
        }
        for perm in &perms {
            let a = act_perm(perm, &dx).map_err(|e| e.to_string())?;
            let b = differential(&act_perm(perm, &x).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut diff = a;
            diff.add_assign(&b.scaled(&rat_i64(-1)));
            if !diff.is_zero() {
                return fail(m, "symmetric group equivariance");
            }
        }
        for g in mats {
            let a = act_matrix(g, &dx).map_err(|e| e.to_string())?;
            let b = differential(&act_matrix(g, &x).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut diff = a;
            diff.add_assign(&b.scaled(&rat_i64(-1)));
            if !diff.is_zero() {
                return fail(m, "modular group equivariance");
            }
        }
    }
    Ok(())
}

#[test]
fn criterion_01_differential_structure() {
    criterion(1, "differential and equivariance", || {
        let mut blocks = 0usize;
        for n in 1..=5usize {
            let table = basis_table(n);
            for monos in table.blocks.values() {
                check_block(n, monos)?;
                blocks += 1;
            }
        }
        // spot blocks at larger n, kept small in p so products stay cheap
        let mut spots = 0usize;
        for (n, picks) in [
            (6usize, vec![(2usize, 2usize, 0i64), (3, 1, 1), (1, 3, -1)]),
            (7, vec![(2, 2, 0), (1, 3, 1)]),
        ] {
            for (p, q, h) in picks {
                let monos = block_basis(n, GradedBlockIndex { p, q, h });
                if monos.is_empty() {
                    return Err(format!("empty spot block ({p}, {q}, {h}) at n={n}"));
                }
                let cap: Vec<_> = monos.into_iter().take(40).collect();
                check_block(n, &cap)?;
                spots += 1;
            }
        }
        Ok(format!(
            "all {blocks} blocks for n <= 5, {spots} spot blocks at n = 6, 7"
        ))
    });
}

#[test]
fn criterion_02_algebra_dimensions() {
    criterion(2, "algebra dimensions", || {
        for n in 1..=8usize {
            let mut expect = 1u128;
            for i in 0..n {
                expect *= 4 + i as u128;
            }
            let got = forest::dim_total(n);
            if got != expect {
                return Err(format!("dim A_{n} = {got}, expected {expect}"));
            }
        }
        // graph arrangement part against the product formula, brute force
        for n in 2..=4usize {
            let model = ellcoh::oracles::FreeForestModel::new(n);
            let (alg, rels) = model.arrangement_relations();
            let dims = alg.quotient_dims(&rels);
            let mut expect = vec![rat_i64(1)];
            for i in 1..n {
                let mut next = vec![Rat::zero(); expect.len() + 1];
                for (d, c) in expect.iter().enumerate() {
                    next[d] += c;
                    next[d + 1] += c * rat_i64(i as i64);
                }
                expect = next;
            }
            let mut got: Vec<Rat> = dims.iter().map(|&d| rat_i64(d as i64)).collect();
            while got.len() < expect.len() {
                got.push(Rat::zero());
            }
            while expect.len() < got.len() {
                expect.push(Rat::zero());
            }
            if got != expect {
                return Err(format!("arrangement dims at n={n}: {dims:?}"));
            }
        }
        Ok("product formula for n <= 8, arrangement part brute-forced for n <= 4".to_string())
    });
}

#[test]
fn criterion_03_two_point_cohomology() {
    criterion(3, "two-point cohomology", || {
        let t = cohomology::tables(2).map_err(|e| e.to_string())?;
        let h = t.poincare(Space::H);
        let b = t.poincare(Space::B);
        if h != vec![1, 4, 5, 2] {
            return Err(format!("P(H_2) = {h:?}"));
        }
        if b != vec![1, 2] {
            return Err(format!("P(B_2) = {b:?}"));
        }
        Ok("P(H_2) = 1 + 4t + 5t^2 + 2t^3 and P(B_2) = 1 + 2t".to_string())
    });
}

#[test]
fn criterion_04_congruence_group_cohomology() {
    criterion(4, "congruence group cohomology", || {
        for level in 2..=5u32 {
            let pres = gamma::builtin_presentation(level).map_err(|e| e.to_string())?;
            for k in 0..=20usize {
                let h1 = gamma::h1_dim(&pres, k).map_err(|e| e.to_string())?;
                let par = gamma::parabolic_h1_dim(&pres, k).map_err(|e| e.to_string())?;
                let w = modular::w_dims(k as u64, level as u64).map_err(|e| e.to_string())?;
                if h1 as i64 != w.total || par as i64 != w.w_low {
                    return Err(format!(
                        "N={level}, k={k}: H1 {h1} vs {}, parabolic {par} vs {}",
                        w.total, w.w_low
                    ));
                }
            }
        }
        Ok("H1 and parabolic H1 match modular dimensions for N in 2..=5, k <= 20".to_string())
    });
}

#[test]
fn criterion_05_amalgam() {
    criterion(5, "amalgam cohomology", || {
        for k in 0..=20usize {
            let h1 = gamma::amalgam_h1_vk(k).map_err(|e| e.to_string())?;
            let w = modular::w_dims(k as u64, 1).map_err(|e| e.to_string())?;
            if h1 as i64 != w.total {
                return Err(format!("k={k}: {h1} vs {}", w.total));
            }
        }
        let v10 = gamma::amalgam_h1_vk(10).map_err(|e| e.to_string())?;
        if v10 != 3 {
            return Err(format!("V_10 gives {v10}, expected 3"));
        }
        Ok("matches level-1 modular dimensions for k <= 20, V_10 gives 3".to_string())
    });
}

#[test]
fn criterion_06_route_agreement() {
    criterion(6, "route agreement", || {
        for n in 1..=5usize {
            let direct = gamma::prelim_route(n).map_err(|e| e.to_string())?;
            let spectral = assemble::betti(n, 1).map_err(|e| e.to_string())?;
            if direct != spectral {
                return Err(format!("n={n}: {spectral:?} vs {direct:?}"));
            }
        }
        let pres = gamma::builtin_presentation(2).map_err(|e| e.to_string())?;
        for n in 1..=5usize {
            let page = assemble::assemble_e2(n, 2).map_err(|e| e.to_string())?;
            let mults = cohomology::dim_tables(n)
                .map_err(|e| e.to_string())?
                .multiplicities(Space::B)
                .map_err(|e| e.to_string())?;
            for d in 0..n {
                let mut by_cocycles = 0usize;
                for k in 0..=mults.max_k() {
                    by_cocycles += mults.by_degree(d, k)
                        * gamma::h1_dim(&pres, k).map_err(|e| e.to_string())?;
                }
                if page.column1_dim(d) != by_cocycles {
                    return Err(format!("level 2 column mismatch at n={n}, degree {d}"));
                }
            }
        }
        Ok("amalgam route for n <= 5 and level-2 cocycle columns agree".to_string())
    });
}

fn pad(v: Vec<usize>, len: usize) -> Vec<usize> {
    let mut v = v;
    while v.len() < len {
        v.push(0);
    }
    v
}

#[test]
fn criterion_07_known_betti_numbers() {
    criterion(7, "known Betti numbers", || {
        let cases = [
            (1usize, 3u32, vec![1usize, 3]),
            (1, 4, vec![1, 5]),
            (1, 5, vec![1, 11]),
            (2, 1, vec![1, 0, 0, 0]),
        ];
        for (n, level, expect) in cases {
            let got = assemble::betti(n, level).map_err(|e| e.to_string())?;
            let len = got.len().max(expect.len());
            if pad(got.clone(), len) != pad(expect.clone(), len) {
                return Err(format!("betti({n}, {level}) = {got:?}, expected {expect:?}"));
            }
        }
        let record = assemble::moduli_record(1, 3, false).map_err(|e| e.to_string())?;
        let expect: Vec<(usize, usize, usize, num_bigint::BigInt)> = vec![
            (0, 0, 0, 1.into()),
            (1, 1, 1, 3.into()),
        ];
        if record.poincare_serre != expect {
            return Err(format!("level-3 polynomial: {:?}", record.poincare_serre));
        }
        Ok("one-point levels 3, 4, 5, two points at level 1, and the level-3 polynomial".to_string())
    });
}

#[test]
fn criterion_08_exact_division() {
    criterion(8, "exact curve-factor division", || {
        // the division and the twist integrality are hard errors inside
        for n in 1..=6usize {
            assemble::moduli_poly(n, 1, false).map_err(|e| format!("n={n}: {e}"))?;
        }
        for n in 1..=4usize {
            for level in 1..=5u32 {
                let r = assemble::moduli_record(n, level, false).map_err(|e| e.to_string())?;
                let mut by_t = vec![num_bigint::BigInt::zero(); r.betti.len()];
                for &(t, _, _, ref c) in &r.poincare_serre {
                    by_t[t] += c;
                }
                if by_t != r.betti {
                    return Err(format!("u = v = 1 mismatch at n={n}, N={level}"));
                }
            }
        }
        Ok("division exact for n <= 6, specializations match for n <= 4, N <= 5".to_string())
    });
}

#[test]
fn criterion_09_equivariant_integrality() {
    criterion(9, "equivariant integrality", || {
        for n in 1..=5usize {
            let tables = cohomology::tables(n).map_err(|e| e.to_string())?;
            for space in [Space::H, Space::B] {
                let mults = tables.multiplicities(space).map_err(|e| e.to_string())?;
                let classes = partitions(n);
                for (&(p, q, k), &m) in &mults.m {
                    let mut cf = ClassFunction::zero(n);
                    for lambda in &classes {
                        let tr = tables
                            .multiplicity_trace(space, lambda, p, q, k)
                            .map_err(|e| e.to_string())?;
                        cf.set(lambda.clone(), tr);
                    }
                    if cf.dim() != rat_i64(m as i64) {
                        return Err(format!(
                            "character dimension mismatch at n={n} (p={p}, q={q}, k={k})"
                        ));
                    }
                    for (lambda, mult) in cf.decompose() {
                        if !mult.denom().is_one() || mult.numer() < &num_bigint::BigInt::zero() {
                            return Err(format!(
                                "multiplicity of {lambda:?} at n={n} (p={p}, q={q}, k={k}) is {mult}"
                            ));
                        }
                    }
                }
            }
        }
        Ok("all block characters decompose integrally and non-negatively for n <= 5".to_string())
    });
}

#[test]
fn criterion_10_large_run_determinism() {
    criterion(10, "large run and determinism", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let bin = env!("CARGO_BIN_EXE_ellcoh");
        let run = || -> Result<(Vec<u8>, f64), String> {
            let start = Instant::now();
            let out = std::process::Command::new(bin)
                .args(["moduli", "--n", "6", "--level", "5"])
                .env("ELLCOH_CACHE_DIR", dir.path())
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!(
                    "CLI failed: {}",
                    String::from_utf8_lossy(&out.stderr)
                ));
            }
            Ok((out.stdout, start.elapsed().as_secs_f64()))
        };
        let (first, cold) = run()?;
        if cold > 600.0 {
            return Err(format!("cold run took {cold:.1} s, budget is 600 s"));
        }
        let (second, _) = run()?;
        if first != second {
            return Err("repeated runs are not byte-identical".to_string());
        }
        let record =
            assemble::from_json(&String::from_utf8_lossy(&first)).map_err(|e| e.to_string())?;
        assemble::validate_record(&record).map_err(|e| e.to_string())?;
        Ok(format!(
            "six points at level 5 in {cold:.1} s, repeat run byte-identical"
        ))
    });
}
