//! Graded monomial bases of W₊(V)[k,l] and their s-decomposition.
//!
//! The fiber of the bundle built from the bold generators is identified
//! with W₊(V) (B ↦ β, Γ ↦ ∂γ, b ↦ b, c ↦ c), so a single basis serves both.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::engine::{Gen, Mode, ModeVec, Monomial};

/// Grading key `[k, l]` or `[k, l, s]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedKey {
    pub k: i64,
    pub l: i64,
    pub s: Option<i64>,
}

impl GradedKey {
    pub fn new(k: i64, l: i64) -> Self {
        GradedKey { k, l, s: None }
    }

    pub fn with_s(k: i64, l: i64, s: i64) -> Self {
        GradedKey { k, l, s: Some(s) }
    }

    /// `[k, l, s]` is empty whenever `k < |s|`.
    pub fn forced_empty(&self) -> bool {
        self.s.is_some_and(|s| self.k < s.abs())
    }
}

/// Ordered monomial basis of one graded piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    pub key: GradedKey,
    pub monomials: Vec<Monomial>,
}

impl GradedBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.monomials.binary_search(m).ok()
    }
}

/// Creation modes of W₊ with weight at most `k`, in canonical order.
fn plus_modes(k: i64) -> Vec<Mode> {
    let mut modes = Vec::new();
    for gen in Gen::ALL {
        // γ(-1) has weight 0 and is excluded from W₊
        let top = if gen == Gen::Gamma { -2 } else { -1 };
        let mut n = top;
        loop {
            let m = Mode::new(gen, n);
            if m.weight_shift() > k {
                break;
            }
            modes.push(m);
            n -= 1;
        }
    }
    modes.sort();
    modes
}

fn search(
    modes: &[Mode],
    start: usize,
    weight_left: i64,
    charge_left: i64,
    current: &mut ModeVec,
    out: &mut Vec<Monomial>,
) {
    if weight_left == 0 && charge_left == 0 {
        out.push(Monomial::from_sorted(current.clone()));
    }
    for i in start..modes.len() {
        let m = modes[i];
        let w = m.weight_shift();
        if w > weight_left {
            continue;
        }
        current.push(m);
        // even modes may repeat, odd modes may not
        let next = if m.is_odd() { i + 1 } else { i };
        // a weight-0 mode can only be c(-1), which is odd, so this terminates
        search(modes, next, weight_left - w, charge_left - m.gen.charge(), current, out);
        current.pop();
    }
}

/// Basis of W₊(V)[k, l].
pub fn enumerate_basis(k: i64, l: i64) -> GradedBasis {
    assert!(k >= 0, "negative weight");
    let modes = plus_modes(k);
    let mut out = Vec::new();
    search(&modes, 0, k, l, &mut SmallVec::new(), &mut out);
    out.sort();
    out.dedup();
    GradedBasis {
        key: GradedKey::new(k, l),
        monomials: out,
    }
}

/// Range of fermion numbers with nonempty W₊[k, ·].
pub fn charge_range(k: i64) -> std::ops::RangeInclusive<i64> {
    // c(-1), c(-2), ... cost 0, 1, 2, ...; b(-1), b(-2), ... cost 1, 2, ...
    let mut max_c = 0;
    while (max_c + 1) * max_c / 2 <= k {
        max_c += 1;
    }
    let mut max_b = 0;
    while (max_b + 1) * (max_b + 2) / 2 <= k {
        max_b += 1;
    }
    -max_b..=max_c
}

/// Splits a basis by `s = #β − #γ`.
pub fn split_by_s(basis: &GradedBasis) -> BTreeMap<i64, GradedBasis> {
    let mut out: BTreeMap<i64, GradedBasis> = BTreeMap::new();
    for m in &basis.monomials {
        let s = m.s_grade();
        out.entry(s)
            .or_insert_with(|| GradedBasis {
                key: GradedKey::with_s(basis.key.k, basis.key.l, s),
                monomials: Vec::new(),
            })
            .monomials
            .push(m.clone());
    }
    debug_assert!(out.values().all(|b| !b.key.forced_empty()));
    out
}

/// The `[k, l, s]` block of W₊ (possibly empty).
pub fn s_block(k: i64, l: i64, s: i64) -> GradedBasis {
    let key = GradedKey::with_s(k, l, s);
    if key.forced_empty() {
        return GradedBasis {
            key,
            monomials: Vec::new(),
        };
    }
    split_by_s(&enumerate_basis(k, l))
        .remove(&s)
        .unwrap_or(GradedBasis {
            key,
            monomials: Vec::new(),
        })
}

/// Basis of W(V)[k, l] restricted to `γ(-1)`-degree at most `dmax`.
pub fn enumerate_full(k: i64, l: i64, dmax: usize) -> GradedBasis {
    let base = enumerate_basis(k, l);
    let g = Mode::new(Gen::Gamma, -1);
    let mut out = Vec::new();
    for m in &base.monomials {
        for d in 0..=dmax {
            let mut raw: ModeVec = m.modes().iter().copied().collect();
            raw.extend(std::iter::repeat_n(g, d));
            let (mono, _) = Monomial::canonicalize(raw).expect("γ(-1) is even");
            out.push(mono);
        }
    }
    out.sort();
    GradedBasis {
        key: GradedKey::new(k, l),
        monomials: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::State;

    fn mono(modes: &[(Gen, i32)]) -> Monomial {
        let raw: ModeVec = modes.iter().map(|&(g, i)| Mode::new(g, i)).collect();
        Monomial::canonicalize(raw).unwrap().0
    }

    #[test]
    fn small_bases() {
        assert_eq!(enumerate_basis(0, 0).monomials, vec![Monomial::vacuum()]);
        assert_eq!(enumerate_basis(0, 1).monomials, vec![mono(&[(Gen::C, -1)])]);
        assert_eq!(
            enumerate_basis(1, 0).monomials,
            vec![
                mono(&[(Gen::Beta, -1)]),
                mono(&[(Gen::Gamma, -2)]),
                mono(&[(Gen::B, -1), (Gen::C, -1)]),
            ]
        );
        assert!(enumerate_basis(0, -1).is_empty());
    }

    #[test]
    fn split_examples() {
        let split = split_by_s(&enumerate_basis(1, 0));
        assert_eq!(split[&1].monomials, vec![mono(&[(Gen::Beta, -1)])]);
        assert_eq!(split[&-1].monomials, vec![mono(&[(Gen::Gamma, -2)])]);
        assert_eq!(split[&0].monomials, vec![mono(&[(Gen::B, -1), (Gen::C, -1)])]);
        let split0 = split_by_s(&enumerate_basis(0, 0));
        assert_eq!(split0.len(), 1);
        assert_eq!(split0[&0].monomials, vec![Monomial::vacuum()]);
        assert!(s_block(1, 0, 2).is_empty());
        assert!(s_block(2, 1, -3).is_empty());
    }

    #[test]
    fn full_bases() {
        let g = |d: usize| mono(&vec![(Gen::Gamma, -1); d]);
        assert_eq!(enumerate_full(0, 0, 1).monomials, vec![g(0), g(1)]);
        assert_eq!(enumerate_full(0, 0, 2).monomials, vec![g(0), g(1), g(2)]);
        assert_eq!(enumerate_full(1, 0, 0).monomials, enumerate_basis(1, 0).monomials);
    }

    #[test]
    fn charge_bounds_cover_all_charges() {
        for k in 0..=6 {
            let r = charge_range(k);
            assert!(!enumerate_basis(k, *r.start()).is_empty());
            assert!(!enumerate_basis(k, *r.end()).is_empty());
            assert!(enumerate_basis(k, r.start() - 1).is_empty());
            assert!(enumerate_basis(k, r.end() + 1).is_empty());
        }
    }

    #[test]
    fn members_are_homogeneous() {
        for k in 0..=3 {
            for l in charge_range(k) {
                for m in &enumerate_basis(k, l).monomials {
                    let s = State::monomial(m.clone());
                    assert_eq!(crate::engine::weight_charge_by_operators(&s), Some((k, l)));
                }
            }
        }
    }
}
