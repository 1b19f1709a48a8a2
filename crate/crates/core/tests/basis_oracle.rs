//! Basis enumeration against a generating-function count.

use std::collections::BTreeMap;

use chiral_core::basis::{charge_range, enumerate_basis, split_by_s};

type Series = BTreeMap<(i64, i64), i64>;

fn truncate_mul(a: &Series, b: &Series, kmax: i64) -> Series {
    let mut out = Series::new();
    for (&(ka, la), &ca) in a {
        for (&(kb, lb), &cb) in b {
            if ka + kb <= kmax {
                *out.entry((ka + kb, la + lb)).or_default() += ca * cb;
            }
        }
    }
    out
}

/// `1/(1 − q^w)` truncated.
fn boson(w: i64, kmax: i64) -> Series {
    (0..=kmax / w).map(|j| ((j * w, 0), 1)).collect()
}

/// `1 + z^charge q^w`.
fn fermion(w: i64, charge: i64) -> Series {
    Series::from([((0, 0), 1), ((w, charge), 1)])
}

/// Π over creation modes of W₊: β(−n) weight n, γ(−n−1) weight n,
/// b(−n) weight n charge −1, c(−n) weight n−1 charge +1.
fn character(kmax: i64) -> Series {
    let mut acc = Series::from([((0, 0), 1)]);
    for n in 1..=kmax {
        acc = truncate_mul(&acc, &boson(n, kmax), kmax);
        acc = truncate_mul(&acc, &boson(n, kmax), kmax);
        acc = truncate_mul(&acc, &fermion(n, -1), kmax);
    }
    for n in 1..=kmax + 1 {
        acc = truncate_mul(&acc, &fermion(n - 1, 1), kmax);
    }
    acc
}

#[test]
fn dimensions_match_generating_function() {
    let kmax = 6;
    let expected = character(kmax);
    for k in 0..=kmax {
        for l in -4..=4 {
            let dim = enumerate_basis(k, l).len() as i64;
            let want = expected.get(&(k, l)).copied().unwrap_or(0);
            assert_eq!(dim, want, "W₊[{k},{l}]");
        }
    }
}

#[test]
fn charge_range_covers_support() {
    let kmax = 8;
    for (&(k, l), &c) in &character(kmax) {
        if c > 0 {
            assert!(charge_range(k).contains(&l), "[{k},{l}] outside range");
        }
    }
    for k in 0..=kmax {
        let range = charge_range(k);
        assert!(!enumerate_basis(k, *range.start()).is_empty());
        assert!(!enumerate_basis(k, *range.end()).is_empty());
    }
}

#[test]
fn basis_members_are_graded_and_ordered() {
    for k in 0..=5 {
        for l in charge_range(k) {
            let basis = enumerate_basis(k, l);
            assert!(basis.monomials.windows(2).all(|w| w[0] < w[1]));
            for m in &basis.monomials {
                assert_eq!((m.weight(), m.charge()), (k, l));
                assert!(m.is_plus());
            }
            let blocks = split_by_s(&basis);
            let total: usize = blocks.values().map(|b| b.len()).sum();
            assert_eq!(total, basis.len());
        }
    }
}
