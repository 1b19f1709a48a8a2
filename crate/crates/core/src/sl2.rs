//! The sl₂ action on W(V), the auxiliary operators 𝓛⁺, and the invariant
//! subspace W^T(V).
//!
//! `𝓛(x^i ∂x)` is the zero mode of `Q_(0)(γ^i b)` and is computed only with
//! state products. `𝓛⁺(x^i ∂x) = (:γ̃^i β:)_(0) − i (::γ̃^{i−1} b: c:)_(0)` is
//! built independently as an explicit sum of mode words, where `γ̃` is the
//! γ field with its `γ_(-1)` mode removed.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::basis::{charge_range, enumerate_basis, enumerate_full, GradedKey};
use crate::engine::{apply_mode, fields, nth_product, Gen, Mode, Monomial, ProductCache, State};
use crate::linalg::{kernel_basis, Matrix};
use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Sl2Error {
    #[error("sl2 generator index {0} is not in {{0, 1, 2}}")]
    BadGenerator(i64),
    #[error("state of weight {weight} exceeds the operator bound {bound}")]
    BoundExceeded { weight: i64, bound: i64 },
    #[error("basis vector {state} of W^T[{k},{l}] is not killed by L(x^{i}d/dx): image {image}")]
    NotInvariant {
        k: i64,
        l: i64,
        i: u8,
        state: String,
        image: String,
    },
}

/// The vector field `x^i ∂/∂x`, `i ∈ {0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sl2Generator(u8);

impl Sl2Generator {
    pub const ALL: [Sl2Generator; 3] = [Sl2Generator(0), Sl2Generator(1), Sl2Generator(2)];

    pub fn new(i: i64) -> Result<Self, Sl2Error> {
        match i {
            0..=2 => Ok(Sl2Generator(i as u8)),
            _ => Err(Sl2Error::BadGenerator(i)),
        }
    }

    pub fn degree(self) -> u8 {
        self.0
    }

    /// `[x^i∂x, x^j∂x] = (j−i) x^{i+j−1}∂x`; `None` when the bracket is zero.
    pub fn bracket(self, other: Sl2Generator) -> Option<(i64, Sl2Generator)> {
        let (i, j) = (self.0 as i64, other.0 as i64);
        if i == j {
            return None;
        }
        Some((j - i, Sl2Generator::new(i + j - 1).ok()?))
    }
}

impl fmt::Display for Sl2Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "d/dx"),
            1 => write!(f, "x d/dx"),
            i => write!(f, "x^{i} d/dx"),
        }
    }
}

/// A free-field mode family entering a normal-ordered product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldFamily {
    Beta,
    Gamma,
    /// γ with `γ_(-1)` removed.
    GammaTilde,
    B,
    C,
}

impl FieldFamily {
    fn gen(self) -> Gen {
        match self {
            FieldFamily::Beta => Gen::Beta,
            FieldFamily::Gamma | FieldFamily::GammaTilde => Gen::Gamma,
            FieldFamily::B => Gen::B,
            FieldFamily::C => Gen::C,
        }
    }

    fn allows(self, index: i32) -> bool {
        !(self == FieldFamily::GammaTilde && index == -1)
    }
}

/// A finite sum of mode words, exact on states of weight at most `bound`.
///
/// Each word is read left to right as an operator product, so its rightmost
/// mode acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeOperator {
    bound: i64,
    terms: Vec<(Scalar, Vec<Mode>)>,
}

impl ModeOperator {
    pub fn zero(bound: i64) -> Self {
        ModeOperator {
            bound,
            terms: Vec::new(),
        }
    }

    /// A single mode.
    pub fn mode(mode: Mode, bound: i64) -> Self {
        ModeOperator {
            bound,
            terms: vec![(Scalar::one(), vec![mode])],
        }
    }

    /// The `n`-th mode of the fully normal-ordered product of `families`,
    /// truncated to words that can act nontrivially on weight ≤ `bound`.
    pub fn normal_ordered(families: &[FieldFamily], n: i64, bound: i64) -> Self {
        let r = families.len() as i64;
        let total = n + 1 - r;
        let lo = -(bound + 2);
        let hi = bound + 1;
        let mut out = ModeOperator::zero(bound);
        let mut idx = vec![0i64; families.len()];
        fill(families, 0, total, lo, hi, bound, &mut idx, &mut out);
        out
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Scalar, Vec<Mode>)] {
        &self.terms
    }

    pub fn scale(mut self, c: &Scalar) -> Self {
        for (x, _) in &mut self.terms {
            *x = &*x * c;
        }
        self.terms.retain(|(x, _)| !x.is_zero());
        self
    }

    pub fn plus(mut self, other: ModeOperator) -> Self {
        self.bound = self.bound.min(other.bound);
        self.terms.extend(other.terms);
        self
    }

    /// Operator product `self ∘ other`.
    pub fn compose(&self, other: &ModeOperator) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                terms.push((a * b, w));
            }
        }
        ModeOperator {
            bound: self.bound.min(other.bound),
            terms,
        }
    }

    pub fn apply(&self, s: &State) -> Result<State, Sl2Error> {
        if let Some(w) = s.max_weight().filter(|&w| w > self.bound) {
            return Err(Sl2Error::BoundExceeded {
                weight: w,
                bound: self.bound,
            });
        }
        let mut out = State::zero();
        for (c, word) in &self.terms {
            let mut cur = s.clone();
            for m in word.iter().rev() {
                cur = apply_mode(*m, &cur);
                if cur.is_zero() {
                    break;
                }
            }
            out.add_scaled(&cur, c);
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    families: &[FieldFamily],
    pos: usize,
    remaining: i64,
    lo: i64,
    hi: i64,
    bound: i64,
    idx: &mut Vec<i64>,
    out: &mut ModeOperator,
) {
    if pos + 1 == families.len() {
        if remaining < lo || remaining > hi {
            return;
        }
        idx[pos] = remaining;
        push_word(families, idx, bound, out);
        return;
    }
    if families.is_empty() {
        return;
    }
    for n in lo..=hi {
        idx[pos] = n;
        fill(families, pos + 1, remaining - n, lo, hi, bound, idx, out);
    }
}

fn push_word(families: &[FieldFamily], idx: &[i64], bound: i64, out: &mut ModeOperator) {
    let modes: Vec<Mode> = families
        .iter()
        .zip(idx)
        .map(|(f, &n)| Mode::new(f.gen(), n as i32))
        .collect();
    if families.iter().zip(&modes).any(|(f, m)| !f.allows(m.index)) {
        return;
    }
    let raise: i64 = modes.iter().filter(|m| m.is_creation()).map(|m| m.weight_shift()).sum();
    let lower: i64 = modes.iter().filter(|m| !m.is_creation()).map(|m| -m.weight_shift()).sum();
    if raise > bound || lower > bound {
        return;
    }
    // creation modes to the left, keeping relative order; odd/odd swaps flip the sign
    let mut sign = 1;
    for (a, x) in modes.iter().enumerate() {
        if x.is_creation() {
            continue;
        }
        for y in &modes[a + 1..] {
            if y.is_creation() && x.is_odd() && y.is_odd() {
                sign = -sign;
            }
        }
    }
    let mut word: Vec<Mode> = modes.iter().copied().filter(|m| m.is_creation()).collect();
    word.extend(modes.iter().copied().filter(|m| !m.is_creation()));
    out.terms.push((Scalar::from_int(sign), word));
}

/// `Q_(0)(γ^i b)`, the field whose zero mode is `𝓛(x^i ∂x)`.
pub fn sl2_field(i: Sl2Generator) -> State {
    let mut s = fields::generator(Gen::B);
    for _ in 0..i.degree() {
        s = apply_mode(Mode::new(Gen::Gamma, -1), &s);
    }
    nth_product(&fields::q(), 0, &s)
}

/// `𝓛(x^i ∂x) a`, through state products only.
pub fn sl2_l(i: Sl2Generator, a: &State) -> State {
    nth_product(&sl2_field(i), 0, a)
}

/// The three 𝓛 operators with their fields precomputed.
pub struct Sl2Action {
    fields: [State; 3],
    cache: ProductCache,
}

impl Default for Sl2Action {
    fn default() -> Self {
        Self::new()
    }
}

impl Sl2Action {
    pub fn new() -> Self {
        Sl2Action {
            fields: Sl2Generator::ALL.map(sl2_field),
            cache: ProductCache::new(),
        }
    }

    pub fn apply(&mut self, i: Sl2Generator, a: &State) -> State {
        self.cache.clear();
        self.cache.product(&self.fields[i.degree() as usize], 0, a)
    }
}

/// `𝓛⁺(x^i ∂x)` as a mode sum exact on weight ≤ `bound`.
pub fn lplus_operator(i: Sl2Generator, bound: i64) -> ModeOperator {
    use FieldFamily::*;
    let d = i.degree() as usize;
    let mut first: Vec<FieldFamily> = vec![GammaTilde; d];
    first.push(Beta);
    let mut op = ModeOperator::normal_ordered(&first, 0, bound);
    if d > 0 {
        let mut second: Vec<FieldFamily> = vec![GammaTilde; d - 1];
        second.extend([B, C]);
        let correction = ModeOperator::normal_ordered(&second, 0, bound).scale(&Scalar::from_int(-(d as i64)));
        op = op.plus(correction);
    }
    op
}

/// The three 𝓛⁺ operators for one weight bound.
pub struct LplusOperators {
    ops: [ModeOperator; 3],
}

impl LplusOperators {
    pub fn new(bound: i64) -> Self {
        LplusOperators {
            ops: Sl2Generator::ALL.map(|i| lplus_operator(i, bound)),
        }
    }

    pub fn get(&self, i: Sl2Generator) -> &ModeOperator {
        &self.ops[i.degree() as usize]
    }

    pub fn apply(&self, i: Sl2Generator, a: &State) -> Result<State, Sl2Error> {
        self.get(i).apply(a)
    }
}

/// `𝓛⁺(x^i ∂x) a`, through mode sums only.
pub fn sl2_lplus(i: Sl2Generator, a: &State) -> State {
    let bound = a.max_weight().unwrap_or(0).max(0);
    lplus_operator(i, bound)
        .apply(a)
        .expect("operator bound matches the state")
}

fn gamma_times(s: &State, power: usize) -> State {
    let mut out = s.clone();
    for _ in 0..power {
        out = apply_mode(Mode::new(Gen::Gamma, -1), &out);
    }
    out
}

/// Checks the three relations between 𝓛 and 𝓛⁺ on
/// `enumerate_full(k, l, dmax)` for `k ≤ kmax`, `|l| ≤ kmax + 1`.
pub fn verify_relation_l(kmax: i64, dmax: usize) -> Report {
    let mut report = Report::new(format!("L versus L+ relations (K ≤ {kmax}, γ(-1)-degree ≤ {dmax})"));
    let mut action = Sl2Action::new();
    let [d0, d1, d2] = Sl2Generator::ALL;
    for k in 0..=kmax {
        let plus = LplusOperators::new(k);
        for l in charge_range(k).filter(|l| l.abs() <= kmax + 1) {
            for m in &enumerate_full(k, l, dmax).monomials {
                let a = State::monomial(m.clone());
                let lp: Vec<State> = Sl2Generator::ALL
                    .iter()
                    .map(|&i| plus.apply(i, &a).expect("weight within bound"))
                    .collect();
                let l0 = action.apply(d0, &a);
                report.check(l0 == lp[0], || ("L(d/dx) = L+(d/dx)".into(), m.to_string(), &l0, &lp[0]));
                let l1 = action.apply(d1, &a);
                let r1 = &lp[1] + &gamma_times(&lp[0], 1);
                report.check(l1 == r1, || {
                    ("L(x d/dx) = L+(x d/dx) + γ(-1)L+(d/dx)".into(), m.to_string(), &l1, &r1)
                });
                let l2 = action.apply(d2, &a);
                let r2 = &(&lp[2] + &gamma_times(&lp[1], 1).scale(&Scalar::from_int(2))) + &gamma_times(&lp[0], 2);
                report.check(l2 == r2, || {
                    (
                        "L(x^2 d/dx) = L+(x^2 d/dx) + 2γ(-1)L+(x d/dx) + γ(-1)^2 L+(d/dx)".into(),
                        m.to_string(),
                        &l2,
                        &r2,
                    )
                });
            }
        }
    }
    report
}

/// Checks `[𝓛(x^i∂x), 𝓛(x^j∂x)] = (j−i) 𝓛(x^{i+j−1}∂x)` on
/// `enumerate_full(k, l, 2)` for `k ≤ kmax`.
pub fn verify_sl2_bracket(kmax: i64) -> Report {
    let mut report = Report::new(format!("sl2 brackets (K ≤ {kmax}, γ(-1)-degree ≤ 2)"));
    let mut action = Sl2Action::new();
    let pairs = [(0, 1), (0, 2), (1, 2)].map(|(i, j)| (Sl2Generator(i), Sl2Generator(j)));
    for k in 0..=kmax {
        for l in charge_range(k).filter(|l| l.abs() <= kmax + 1) {
            for m in &enumerate_full(k, l, 2).monomials {
                let a = State::monomial(m.clone());
                for &(i, j) in &pairs {
                    let ja = action.apply(j, &a);
                    let ia = action.apply(i, &a);
                    let lhs = &action.apply(i, &ja) - &action.apply(j, &ia);
                    let (c, g) = i.bracket(j).expect("distinct generators bracket nontrivially");
                    let rhs = action.apply(g, &a).scale(&Scalar::from_int(c));
                    report.check(lhs == rhs, || {
                        (format!("[L({i}), L({j})] = {c} L({g})"), m.to_string(), &lhs, &rhs)
                    });
                }
            }
        }
    }
    report
}

/// Matrix of a family of linear maps on `domain`, stacked vertically.
fn stacked_matrix(domain: &[Monomial], images: &[Vec<State>]) -> Matrix {
    let mut rows: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for (op, imgs) in images.iter().enumerate() {
        for img in imgs {
            for m in img.monomials() {
                rows.entry((op, m.clone())).or_insert(0);
            }
        }
    }
    for (n, v) in rows.values_mut().enumerate() {
        *v = n;
    }
    let mut mat = Matrix::zeros(rows.len(), domain.len());
    for (op, imgs) in images.iter().enumerate() {
        for (col, img) in imgs.iter().enumerate() {
            for (m, c) in img.iter() {
                mat.set(rows[&(op, m.clone())], col, c.clone());
            }
        }
    }
    mat
}

pub(crate) fn kernel_states(domain: &[Monomial], images: &[Vec<State>]) -> Vec<State> {
    let mat = stacked_matrix(domain, images);
    kernel_basis(&mat)
        .into_iter()
        .map(|v| {
            domain
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), c))
                .collect()
        })
        .collect()
}

/// Basis of `W^T(V)[k, l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSpace {
    pub key: GradedKey,
    pub basis: Vec<State>,
}

impl InvariantSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// `W^T(V)[k, l]`: on W₊ monomials with `s = l` (the kernel of `𝓛⁺(x∂x)`),
/// the kernel of `𝓛⁺(x²∂x)`, re-verified against all three 𝓛 operators.
pub fn invariants(k: i64, l: i64) -> Result<InvariantSpace, Sl2Error> {
    assert!(k >= 0, "negative weight");
    let candidates: Vec<Monomial> = enumerate_basis(k, l)
        .monomials
        .into_iter()
        .filter(|m| m.s_grade() == l)
        .collect();
    let op = lplus_operator(Sl2Generator(2), k);
    let images: Vec<State> = candidates
        .iter()
        .map(|m| op.apply(&State::monomial(m.clone())).expect("weight within bound"))
        .collect();
    let basis = kernel_states(&candidates, &[images]);
    let mut action = Sl2Action::new();
    for a in &basis {
        for i in Sl2Generator::ALL {
            let image = action.apply(i, a);
            if !image.is_zero() {
                return Err(Sl2Error::NotInvariant {
                    k,
                    l,
                    i: i.degree(),
                    state: a.to_string(),
                    image: image.to_string(),
                });
            }
        }
    }
    Ok(InvariantSpace {
        key: GradedKey::new(k, l),
        basis,
    })
}

/// Kernel of all three 𝓛 operators on `enumerate_full(k, l, dmax)`.
pub fn kernel_by_l(k: i64, l: i64, dmax: usize) -> Vec<State> {
    let domain = enumerate_full(k, l, dmax).monomials;
    let mut action = Sl2Action::new();
    let images: Vec<Vec<State>> = Sl2Generator::ALL
        .iter()
        .map(|&i| {
            domain
                .iter()
                .map(|m| action.apply(i, &State::monomial(m.clone())))
                .collect()
        })
        .collect();
    kernel_states(&domain, &images)
}

/// Kernel of all three 𝓛⁺ operators on `enumerate_full(k, l, dmax)`.
pub fn kernel_by_lplus(k: i64, l: i64, dmax: usize) -> Vec<State> {
    let domain = enumerate_full(k, l, dmax).monomials;
    let ops = LplusOperators::new(k);
    let images: Vec<Vec<State>> = Sl2Generator::ALL
        .iter()
        .map(|&i| {
            domain
                .iter()
                .map(|m| ops.apply(i, &State::monomial(m.clone())).expect("weight within bound"))
                .collect()
        })
        .collect();
    kernel_states(&domain, &images)
}

/// Graded dimensions of `W^T(V)` up to weight `max_weight`; zero entries
/// are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    pub max_weight: i64,
    pub entries: BTreeMap<(i64, i64), usize>,
}

impl CharacterTable {
    pub fn dim(&self, k: i64, l: i64) -> usize {
        self.entries.get(&(k, l)).copied().unwrap_or(0)
    }
}

pub fn character(max_weight: i64) -> Result<CharacterTable, Sl2Error> {
    let mut entries = BTreeMap::new();
    for k in 0..=max_weight {
        for l in charge_range(k) {
            let d = invariants(k, l)?.dimension();
            if d > 0 {
                entries.insert((k, l), d);
            }
        }
    }
    Ok(CharacterTable { max_weight, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Monomial;

    fn st(modes: &[(Gen, i32)]) -> State {
        let v: Vec<Mode> = modes.iter().map(|&(g, i)| Mode::new(g, i)).collect();
        State::from_modes(&v)
    }

    const D0: Sl2Generator = Sl2Generator(0);
    const D1: Sl2Generator = Sl2Generator(1);
    const D2: Sl2Generator = Sl2Generator(2);

    #[test]
    fn bracket_table() {
        assert_eq!(D0.bracket(D1), Some((1, D0)));
        assert_eq!(D0.bracket(D2), Some((2, D1)));
        assert_eq!(D1.bracket(D2), Some((1, D2)));
        assert_eq!(D2.bracket(D0), Some((-2, D1)));
        assert_eq!(D1.bracket(D1), None);
        assert!(Sl2Generator::new(3).is_err());
    }

    #[test]
    fn l_kills_vacuum() {
        for i in Sl2Generator::ALL {
            assert!(sl2_l(i, &State::vacuum()).is_zero());
            assert!(sl2_lplus(i, &State::vacuum()).is_zero());
        }
    }

    #[test]
    fn translation_generator_is_beta_zero() {
        assert_eq!(sl2_l(D0, &st(&[(Gen::Gamma, -1)])), State::vacuum());
        let a = st(&[(Gen::Beta, -1), (Gen::Gamma, -1), (Gen::C, -2)]);
        assert_eq!(sl2_lplus(D0, &a), apply_mode(Mode::new(Gen::Beta, 0), &a));
        assert!(sl2_lplus(D0, &st(&[(Gen::C, -1)])).is_zero());
    }

    #[test]
    fn euler_eigenvalue_fixture() {
        // engine sign: eigenvalue (#γ + #c) − (#β + #b) on W₊ monomials
        let beta = st(&[(Gen::Beta, -1)]);
        assert_eq!(sl2_l(D1, &beta), beta.scale(&Scalar::from_int(-1)));
        assert_eq!(sl2_lplus(D1, &beta), beta.scale(&Scalar::from_int(-1)));
        assert!(sl2_lplus(D1, &st(&[(Gen::B, -1), (Gen::C, -1)])).is_zero());
    }

    #[test]
    fn euler_operator_is_diagonal_on_plus_monomials() {
        for k in 0..=3 {
            for l in charge_range(k) {
                for m in &enumerate_basis(k, l).monomials {
                    let a = State::monomial(m.clone());
                    let count = |g| m.count(g) as i64;
                    let gammas = count(Gen::Gamma) - m.gamma_degree() as i64;
                    let expected = (gammas + count(Gen::C)) - (count(Gen::Beta) + count(Gen::B));
                    assert_eq!(sl2_lplus(D1, &a), a.scale(&Scalar::from_int(expected)), "{m}");
                }
            }
        }
    }

    #[test]
    fn lplus_x2_on_bc_fixture() {
        // only the word γ(-2)b(0)c(0) of −2(:γ̃bc:)_(0) survives
        let a = st(&[(Gen::B, -1), (Gen::C, -1)]);
        let out = sl2_lplus(D2, &a);
        let engine = sl2_l(D2, &a);
        assert_eq!(out, engine);
        assert_eq!(out, st(&[(Gen::Gamma, -2)]).scale(&Scalar::from_int(-2)));
    }

    #[test]
    fn grading_preserved() {
        for k in 0..=2 {
            for l in charge_range(k) {
                for m in &enumerate_full(k, l, 1).monomials {
                    let a = State::monomial(m.clone());
                    for i in Sl2Generator::ALL {
                        for img in [sl2_l(i, &a), sl2_lplus(i, &a)] {
                            for n in img.monomials() {
                                assert_eq!((n.weight(), n.charge()), (k, l));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_invariant_spaces() {
        let v = invariants(0, 0).unwrap();
        assert_eq!(v.basis, vec![State::vacuum()]);
        assert_eq!(invariants(0, 1).unwrap().dimension(), 0);
        assert_eq!(invariants(1, 0).unwrap().dimension(), 0);
    }

    #[test]
    fn bracket_on_gamma() {
        let g = st(&[(Gen::Gamma, -1)]);
        let lhs = &sl2_l(D0, &sl2_l(D2, &g)) - &sl2_l(D2, &sl2_l(D0, &g));
        assert_eq!(lhs, sl2_l(D1, &g).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn relations_at_weight_zero() {
        let r = verify_relation_l(0, 2);
        assert!(r.passed(), "{r}");
        assert!(r.checks > 0);
    }

    #[test]
    fn dual_kernels_small() {
        for k in 0..=2 {
            for l in charge_range(k) {
                let a = kernel_by_l(k, l, 2);
                let b = kernel_by_lplus(k, l, 2);
                assert_eq!(a, b);
                assert!(a.iter().all(|s| s.monomials().all(Monomial::is_plus)));
                assert_eq!(a.len(), invariants(k, l).unwrap().dimension());
            }
        }
    }
}
