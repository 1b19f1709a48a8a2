//! Dimensions of global sections on a curve of genus `g ≥ 2`, assembled
//! from invariant spaces and line-bundle section counts.

use std::collections::BTreeMap;

use crate::basis::{charge_range, enumerate_basis, split_by_s};
use crate::sl2::{invariants, Sl2Error};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssemblyError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(i64),
    #[error("weight must be non-negative, got {0}")]
    NegativeWeight(i64),
    #[error(transparent)]
    Invariants(#[from] Sl2Error),
}

/// `h⁰(K^m)` on a curve of genus `g ≥ 2` for `m ≥ 1`, by Riemann–Roch.
pub fn canonical_power_sections(m: i64, genus: i64) -> i64 {
    assert!(m >= 1, "only positive powers enter the sum");
    if m == 1 {
        genus
    } else {
        (2 * m - 1) * (genus - 1)
    }
}

/// `N(k, l, s)`: the number of W₊ monomials in `[k, l, s]`.
pub fn block_sizes(k: i64, l: i64) -> BTreeMap<i64, usize> {
    split_by_s(&enumerate_basis(k, l))
        .into_iter()
        .map(|(s, b)| (s, b.len()))
        .collect()
}

/// `dim W^T[k, l] + Σ_{s<l} N(k, l, s) h⁰(K^{l−s})`.
pub fn global_dimension(k: i64, l: i64, genus: i64) -> Result<usize, AssemblyError> {
    if genus < 2 {
        return Err(AssemblyError::GenusTooSmall(genus));
    }
    if k < 0 {
        return Err(AssemblyError::NegativeWeight(k));
    }
    let mut total = invariants(k, l)?.dimension();
    for (s, n) in block_sizes(k, l) {
        if s < l {
            let h0 = usize::try_from(canonical_power_sections(l - s, genus)).expect("genus ≥ 2");
            total += n * h0;
        }
    }
    Ok(total)
}

/// Nonzero global dimensions for `k ≤ max_weight`, keyed by `(k, l)`.
pub fn global_table(max_weight: i64, genus: i64) -> Result<BTreeMap<(i64, i64), usize>, AssemblyError> {
    if genus < 2 {
        return Err(AssemblyError::GenusTooSmall(genus));
    }
    if max_weight < 0 {
        return Err(AssemblyError::NegativeWeight(max_weight));
    }
    let mut out = BTreeMap::new();
    for k in 0..=max_weight {
        for l in charge_range(k) {
            let d = global_dimension(k, l, genus)?;
            if d > 0 {
                out.insert((k, l), d);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_roch_counts() {
        assert_eq!(canonical_power_sections(1, 2), 2);
        assert_eq!(canonical_power_sections(2, 2), 3);
        assert_eq!(canonical_power_sections(3, 4), 15);
    }

    #[test]
    fn genus_two_weight_one() {
        let table = global_table(1, 2).unwrap();
        let want: BTreeMap<(i64, i64), usize> =
            [((0, 0), 1), ((0, 1), 2), ((1, 0), 2), ((1, 1), 5), ((1, 2), 3)].into_iter().collect();
        assert_eq!(table, want);
    }

    #[test]
    fn rejects_small_genus() {
        assert_eq!(global_table(1, 1), Err(AssemblyError::GenusTooSmall(1)));
        assert_eq!(global_dimension(-1, 0, 2), Err(AssemblyError::NegativeWeight(-1)));
    }

    #[test]
    fn genus_dependence_is_confined_to_line_bundles() {
        let a = global_table(3, 2).unwrap();
        let b = global_table(3, 5).unwrap();
        for k in 0..=3 {
            for l in charge_range(k) {
                let inv = invariants(k, l).unwrap().dimension();
                let lower = |g: i64| -> usize {
                    block_sizes(k, l)
                        .into_iter()
                        .filter(|&(s, _)| s < l)
                        .map(|(s, n)| n * canonical_power_sections(l - s, g) as usize)
                        .sum()
                };
                let da = a.get(&(k, l)).copied().unwrap_or(0);
                let db = b.get(&(k, l)).copied().unwrap_or(0);
                assert_eq!(da - lower(2), inv);
                assert_eq!(db - lower(5), inv);
            }
        }
    }
}
