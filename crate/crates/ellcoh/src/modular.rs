//! Dimension formulas for spaces of modular forms for principal congruence
//! subgroups, and the weight-graded dimensions of first cohomology with
//! coefficients in the symmetric powers of the standard representation.
//!
//! Three regimes: level 1 uses the classical dimension formulas for the full
//! modular group, level 2 has all cusps irregular for odd weight (odd-weight
//! spaces vanish since -Id lies in the group), and level >= 3 is torsion-free
//! with all cusps regular.

use crate::error::{Error, Result};

/// Index data of the principal congruence subgroup of the given level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaData {
    pub level: u64,
    /// Index of Gamma(N) in SL2(Z).
    pub mu: i64,
    /// Index of the image in PSL2(Z).
    pub mu_bar: i64,
    /// Number of cusps of the modular curve X(N).
    pub eps_inf: i64,
    /// Genus of X(N).
    pub genus: i64,
}

fn prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn gamma_data(level: u64) -> Result<GammaData> {
    if level == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    if level == 1 {
        return Ok(GammaData {
            level,
            mu: 1,
            mu_bar: 1,
            eps_inf: 1,
            genus: 0,
        });
    }
    // mu = N^3 prod_{p | N} (1 - p^-2), exact integer arithmetic
    let n = level as i128;
    let mut num = n * n * n;
    let mut den = 1i128;
    for p in prime_factors(level) {
        let p = p as i128;
        num *= p * p - 1;
        den *= p * p;
    }
    if num % den != 0 {
        return Err(Error::ModularMismatch(format!(
            "index formula is not integral at level {level}"
        )));
    }
    let mu = num / den;
    let mu_bar = if level == 2 { mu } else { mu / 2 };
    if level > 2 && mu % 2 != 0 {
        return Err(Error::ModularMismatch(format!(
            "index {mu} is odd at level {level}"
        )));
    }
    let eps = mu_bar / n;
    if mu_bar % n != 0 {
        return Err(Error::ModularMismatch(format!(
            "cusp count is not integral at level {level}"
        )));
    }
    // genus = 1 + mu_bar (N - 6) / (12 N)
    let gnum = mu_bar * (n - 6);
    let gden = 12 * n;
    if gnum % gden != 0 {
        return Err(Error::ModularMismatch(format!(
            "genus formula is not integral at level {level}"
        )));
    }
    let genus = 1 + gnum / gden;
    if genus < 0 || eps <= 0 || mu <= 0 {
        return Err(Error::ModularMismatch(format!(
            "nonsensical curve data at level {level}"
        )));
    }
    Ok(GammaData {
        level,
        mu: mu as i64,
        mu_bar: mu_bar as i64,
        eps_inf: eps as i64,
        genus: genus as i64,
    })
}

/// Dimensions of the weight-k spaces: s cusp forms, g all modular forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightDims {
    pub k: u64,
    pub level: u64,
    pub s: i64,
    pub g: i64,
}

pub fn dims(k: u64, level: u64) -> Result<WeightDims> {
    if k < 2 {
        return Err(Error::invalid("weight must be at least 2"));
    }
    let data = gamma_data(level)?;
    let done = |s: i64, g: i64| -> Result<WeightDims> {
        if s < 0 || g < s {
            return Err(Error::ModularMismatch(format!(
                "negative dimension at weight {k} level {level}: s={s} g={g}"
            )));
        }
        Ok(WeightDims { k, level, s, g })
    };
    if level == 1 {
        if k % 2 == 1 {
            return done(0, 0);
        }
        if k == 2 {
            return done(0, 0);
        }
        let m = if k % 12 == 2 {
            (k / 12) as i64
        } else {
            (k / 12) as i64 + 1
        };
        return done(m - 1, m);
    }
    if level == 2 && k % 2 == 1 {
        return done(0, 0);
    }
    let genus = data.genus;
    let eps = data.eps_inf;
    if k == 2 {
        return done(genus, genus + eps - 1);
    }
    let ki = k as i64;
    let s = if k % 2 == 0 {
        (ki - 1) * (genus - 1) + (ki / 2 - 1) * eps
    } else {
        (ki - 1) * (genus - 1) + ((ki - 2) * eps) / 2
    };
    if k % 2 == 1 && ((k as i64 - 2) * eps) % 2 != 0 {
        return Err(Error::ModularMismatch(format!(
            "odd-weight cusp dimension is not integral at weight {k} level {level}"
        )));
    }
    done(s, s + eps)
}

/// Weight-graded dimensions of H^1 of the level group with coefficients in
/// the k-th symmetric power: the cuspidal part contributes twice the cusp
/// dimension in the low weight, the residual part sits in the high weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct H1Dims {
    pub k: u64,
    pub level: u64,
    pub total: i64,
    pub w_low: i64,
    pub w_high: i64,
}

pub fn w_dims(k: u64, level: u64) -> Result<H1Dims> {
    let d = dims(k + 2, level)?;
    Ok(H1Dims {
        k,
        level,
        total: d.s + d.g,
        w_low: 2 * d.s,
        w_high: d.g - d.s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_data_small_levels() {
        let expect = [
            (1, 1, 1, 1, 0),
            (2, 6, 6, 3, 0),
            (3, 24, 12, 4, 0),
            (4, 48, 24, 6, 0),
            (5, 120, 60, 12, 0),
            (6, 144, 72, 12, 1),
            (7, 336, 168, 24, 3),
            (8, 384, 192, 24, 5),
        ];
        for (n, mu, mu_bar, eps, genus) in expect {
            let d = gamma_data(n).unwrap();
            assert_eq!((d.mu, d.mu_bar, d.eps_inf, d.genus), (mu, mu_bar, eps, genus), "level {n}");
        }
    }

    #[test]
    fn level_one_classical_dimensions() {
        let s: Vec<i64> = (2..=26)
            .step_by(2)
            .map(|k| dims(k, 1).unwrap().s)
            .collect();
        assert_eq!(s, vec![0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1]);
        assert_eq!(dims(4, 1).unwrap().g, 1);
        assert_eq!(dims(12, 1).unwrap().g, 2);
        assert_eq!(dims(3, 1).unwrap(), WeightDims { k: 3, level: 1, s: 0, g: 0 });
    }

    #[test]
    fn level_two_and_three_tables() {
        // level 2: odd weights vanish, even weights k >= 4 have s = k/2 - 2
        for k in (4..=20).step_by(2) {
            let d = dims(k, 2).unwrap();
            assert_eq!(d.s, k as i64 / 2 - 2);
            assert_eq!(d.g, d.s + 3);
        }
        assert_eq!(dims(2, 2).unwrap(), WeightDims { k: 2, level: 2, s: 0, g: 2 });
        assert_eq!(dims(5, 2).unwrap().g, 0);
        // level 3 spot values
        assert_eq!(dims(2, 3).unwrap(), WeightDims { k: 2, level: 3, s: 0, g: 3 });
        assert_eq!(dims(3, 3).unwrap().s, 0);
        assert_eq!(dims(3, 3).unwrap().g, 4);
        assert_eq!(dims(6, 3).unwrap().s, 3);
        // level 5 weight 3
        assert_eq!(dims(3, 5).unwrap().s, 4);
        assert_eq!(dims(3, 5).unwrap().g, 16);
    }

    #[test]
    fn h1_total_matches_free_rank_count() {
        // For N >= 2 the image in PSL2(Z) is free of rank 1 + mu_bar/6, so
        // H^1 with coefficients in V_k has dimension (rank-1)(k+1) except
        // that V_0 picks up the invariants.
        for level in 2..=12u64 {
            let data = gamma_data(level).unwrap();
            for k in 0..=20u64 {
                if level == 2 && k % 2 == 1 {
                    continue;
                }
                let w = w_dims(k, level).unwrap();
                let mut expect = (data.mu_bar / 6) * (k as i64 + 1);
                if k == 0 {
                    expect += 1;
                }
                assert_eq!(w.total, expect, "level {level} k {k}");
                assert_eq!(w.total, w.w_low / 2 + w.w_high + w.w_low / 2);
                assert!(w.w_low >= 0 && w.w_high >= 0);
            }
        }
    }

    #[test]
    fn weight_one_rejected() {
        assert!(dims(1, 5).is_err());
        assert!(dims(0, 3).is_err());
        assert!(gamma_data(0).is_err());
    }

    #[test]
    fn level_one_h1() {
        // H^1(SL2(Z), V_k) = 2 s_{k+2} + (Eisenstein: 1 for even k >= 2)
        assert_eq!(w_dims(10, 1).unwrap().total, 3); // weight 12: cusp dim 1
        assert_eq!(w_dims(2, 1).unwrap().total, 1); // E_4 only
        assert_eq!(w_dims(0, 1).unwrap().total, 0); // M_2(SL2(Z)) = 0
        assert_eq!(w_dims(9, 1).unwrap().total, 0);
    }
}
