//! Partitions of n, cycle types and permutation helpers.
//!
//! Equivariant results are reported per conjugacy class of the symmetric
//! group, indexed by the cycle type written as a partition string such as
//! "3+1". Class sizes give the weights needed to average traces.

use num_bigint::BigInt;
use num_traits::One;

/// All partitions of n with parts in decreasing order, listed in descending
/// lexicographic order; `partitions(0)` is the single empty partition.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Render a partition as "3+1"; the empty partition renders as "e".
pub fn partition_string(parts: &[usize]) -> String {
    if parts.is_empty() {
        return "e".to_string();
    }
    parts
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

pub fn factorial(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    f
}

/// Centralizer order z_mu = prod_i i^{m_i} m_i! where m_i is the number of
/// parts equal to i.
pub fn z_mu(parts: &[usize]) -> BigInt {
    let mut mult = std::collections::BTreeMap::new();
    for &p in parts {
        *mult.entry(p).or_insert(0usize) += 1;
    }
    let mut z = BigInt::one();
    for (i, m) in mult {
        z *= BigInt::from(i).pow(m as u32) * factorial(m);
    }
    z
}

/// Size of the conjugacy class with the given cycle type in S_n.
pub fn class_size(parts: &[usize]) -> BigInt {
    let n: usize = parts.iter().sum();
    factorial(n) / z_mu(parts)
}

/// A canonical permutation (0-indexed image array of length n) with the given
/// cycle type: consecutive blocks cycled forwards.
pub fn canonical_permutation(parts: &[usize]) -> Vec<usize> {
    let n: usize = parts.iter().sum();
    let mut perm = vec![0usize; n];
    let mut start = 0;
    for &len in parts {
        for k in 0..len {
            perm[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    perm
}

/// Cycle type of a permutation given as an image array, parts decreasing.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// Composition acting left to right on points: (f then g)(i) = g(f(i)).
pub fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    assert_eq!(f.len(), g.len());
    f.iter().map(|&i| g[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn partition_counts() {
        let expect = [1usize, 1, 2, 3, 5, 7, 11, 15, 22];
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(partitions(n).len(), e, "p({n})");
        }
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for n in 1..=7 {
            let total: BigInt = partitions(n).iter().map(|p| class_size(p)).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn canonical_permutation_has_requested_type() {
        for n in 0..=6 {
            for parts in partitions(n) {
                let perm = canonical_permutation(&parts);
                assert_eq!(cycle_type(&perm), parts);
            }
        }
    }

    #[test]
    fn strings() {
        assert_eq!(partition_string(&[3, 1]), "3+1");
        assert_eq!(partition_string(&[1, 1, 1]), "1+1+1");
        assert_eq!(partition_string(&[]), "e");
    }

    #[test]
    fn composition_order() {
        // f = (0 1), g = (1 2) on three points: f then g sends 0->2.
        let f = vec![1, 0, 2];
        let g = vec![0, 2, 1];
        assert_eq!(compose(&f, &g), vec![2, 0, 1]);
    }
}
