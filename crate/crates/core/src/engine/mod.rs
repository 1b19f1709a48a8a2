//! The βγ–bc free-field vertex algebra W(V) for one-dimensional V.
//!
//! States are linear combinations of canonical monomials in creation modes.
//! The n-th product `a_(n) b` is computed by peeling the leading generator
//! mode of `a` and applying the iterate formula
//!
//! ```text
//! (u_(p) v)_(n) = Σ_{j≥0} (−1)^j C(p,j) ( u_(p−j) v_(n+j) − (−1)^{p+|u||v|} v_(p+n−j) u_(j) )
//! ```
//!
//! recursively, so only generator modes ever act directly on monomials.

pub(crate) mod kernel;
mod mode;
mod state;

use num_traits::Zero;
use smallvec::SmallVec;

pub use mode::{Gen, Mode, ModeVec, Monomial};
pub use state::{Grading, State};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("annihilation mode {0} in a normal-ordered monomial")]
    AnnihilationMode(Mode),
}

/// Normal-orders a product of creation modes, times `sign`.
pub fn normalize(raw: &[Mode], sign: i64) -> Result<State, EngineError> {
    Ok(match Monomial::parse_modes(raw)? {
        Some((m, s)) => State::term(m, Scalar::from_int(s * sign)),
        None => State::zero(),
    })
}

/// Action of a single generator mode on a monomial.
fn apply_mode_mono(mode: Mode, m: &Monomial) -> State {
    let modes = m.modes();
    if mode.is_creation() {
        let pos = modes.partition_point(|x| *x < mode);
        if mode.is_odd() && modes.get(pos) == Some(&mode) {
            return State::zero();
        }
        let passed_odd = modes[..pos].iter().filter(|x| x.is_odd()).count();
        let sign = if mode.is_odd() && passed_odd % 2 == 1 { -1 } else { 1 };
        let mut v: ModeVec = SmallVec::with_capacity(modes.len() + 1);
        v.extend_from_slice(&modes[..pos]);
        v.push(mode);
        v.extend_from_slice(&modes[pos..]);
        return State::term(Monomial::from_sorted(v), Scalar::from_int(sign));
    }
    let mut out = State::zero();
    let mut sign = 1;
    for (i, y) in modes.iter().enumerate() {
        let c = mode.contraction(*y);
        if c != 0 {
            out.add_term(m.without(i), Scalar::from_int(sign * c));
        }
        if mode.is_odd() && y.is_odd() {
            sign = -sign;
        }
    }
    out
}

/// Action of a generator mode `gen_(n)` on a state.
pub fn apply_mode(mode: Mode, s: &State) -> State {
    let mut out = State::zero();
    for (m, c) in s.iter() {
        out.add_scaled(&apply_mode_mono(mode, m), c);
    }
    out
}

/// `C(p, j)` by the falling-factorial formula, valid for negative `p`.
pub fn binomial(p: i64, j: i64) -> i128 {
    if j < 0 {
        return 0;
    }
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for t in 0..j {
        num *= (p - t) as i128;
        den *= (t + 1) as i128;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den.abs(), 1);
    num * den.signum()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Memo table for monomial-level n-th products.
///
/// The cache is a plain value owned by the caller; nothing is shared.
#[derive(Default)]
pub struct ProductCache {
    kernel: kernel::Kernel,
}

impl ProductCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.kernel.products_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&mut self) {
        self.kernel.clear();
    }

    /// `a_(n) b`, bilinear in both arguments.
    pub fn product(&mut self, a: &State, n: i64, b: &State) -> State {
        let mut out = State::zero();
        for (am, ac) in a.iter() {
            let ai = self.kernel.interner.intern(am);
            for (bm, bc) in b.iter() {
                let bi = self.kernel.interner.intern(bm);
                let p = self.kernel.product(ai, n, bi);
                let coeff = ac * bc;
                for &(t, c) in p.iter() {
                    out.add_term(self.kernel.interner.get(t).clone(), &coeff * &Scalar::from_int(c));
                }
            }
        }
        out
    }

    pub fn product_mono(&mut self, a: &Monomial, n: i64, b: &Monomial) -> State {
        let ai = self.kernel.interner.intern(a);
        let bi = self.kernel.interner.intern(b);
        let p = self.kernel.product(ai, n, bi);
        self.kernel.to_state(&p)
    }
}

/// `a_(n) b`.
pub fn nth_product(a: &State, n: i64, b: &State) -> State {
    ProductCache::new().product(a, n, b)
}

/// Wick product `:ab: = a_(-1) b`.
pub fn wick(a: &State, b: &State) -> State {
    nth_product(a, -1, b)
}

/// Translation operator `L_{-1}`, acting as the derivation
/// `x_(n) ↦ −n x_(n−1)` on each factor.
pub fn translate(a: &State) -> State {
    let mut out = State::zero();
    for (m, c) in a.iter() {
        for (i, x) in m.modes().iter().enumerate() {
            if x.index == 0 {
                continue;
            }
            let mut raw: ModeVec = m.modes().iter().copied().collect();
            raw[i] = Mode::new(x.gen, x.index - 1);
            if let Some((mono, sign)) = Monomial::canonicalize(raw) {
                out.add_term(mono, c * &Scalar::from_int(-(x.index as i64) * sign));
            }
        }
    }
    out
}

/// Conformal weight and fermion number by mode counting.
pub fn weight_charge(a: &State) -> Grading {
    a.grading()
}

/// The same grading read off from `L_(1)` and `J_(0)`; `None` when the
/// state is not an eigenvector of both.
pub fn weight_charge_by_operators(a: &State) -> Option<(i64, i64)> {
    if a.is_zero() {
        return None;
    }
    let mut cache = ProductCache::new();
    let la = cache.product(&fields::conformal(), 1, a);
    let ja = cache.product(&fields::current(), 0, a);
    let (m, c) = a.iter().next()?;
    let k = &la.coeff(m) / c;
    let l = &ja.coeff(m) / c;
    if la != a.scale(&k) || ja != a.scale(&l) {
        return None;
    }
    Some((k.as_i64()?, l.as_i64()?))
}

/// The topological fields Q, L, J, G as states.
pub mod fields {
    use super::*;

    const fn m(gen: Gen, index: i32) -> Mode {
        Mode::new(gen, index)
    }

    /// `Q = :βc:`.
    pub fn q() -> State {
        State::from_modes(&[m(Gen::Beta, -1), m(Gen::C, -1)])
    }

    /// `L = :β∂γ: − :b∂c:`.
    pub fn conformal() -> State {
        let a = State::from_modes(&[m(Gen::Beta, -1), m(Gen::Gamma, -2)]);
        let b = State::from_modes(&[m(Gen::B, -1), m(Gen::C, -2)]);
        &a - &b
    }

    /// `J = −:bc:`.
    pub fn current() -> State {
        -&State::from_modes(&[m(Gen::B, -1), m(Gen::C, -1)])
    }

    /// `G = :b∂γ:`.
    pub fn g() -> State {
        State::from_modes(&[m(Gen::B, -1), m(Gen::Gamma, -2)])
    }

    /// The generator state `gen_(-1) 1`.
    pub fn generator(gen: Gen) -> State {
        State::from_modes(&[m(gen, -1)])
    }
}

impl Zero for State {
    fn zero() -> Self {
        State::zero()
    }
    fn is_zero(&self) -> bool {
        State::is_zero(self)
    }
}

impl std::ops::Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::fields::*;
    use super::*;

    fn st(modes: &[(Gen, i32)]) -> State {
        let v: Vec<Mode> = modes.iter().map(|&(g, i)| Mode::new(g, i)).collect();
        State::from_modes(&v)
    }

    #[test]
    fn normalize_examples() {
        let cb = normalize(&[Mode::new(Gen::C, -1), Mode::new(Gen::B, -1)], 1).unwrap();
        assert_eq!(cb, -&st(&[(Gen::B, -1), (Gen::C, -1)]));
        let bb = normalize(&[Mode::new(Gen::B, -1), Mode::new(Gen::B, -1)], 1).unwrap();
        assert!(bb.is_zero());
        let gb = normalize(&[Mode::new(Gen::Gamma, -2), Mode::new(Gen::Beta, -1)], 1).unwrap();
        assert_eq!(gb, st(&[(Gen::Beta, -1), (Gen::Gamma, -2)]));
        assert_eq!(
            normalize(&[Mode::new(Gen::C, 0)], 1),
            Err(EngineError::AnnihilationMode(Mode::new(Gen::C, 0)))
        );
    }

    #[test]
    fn apply_mode_examples() {
        let one = State::vacuum();
        assert_eq!(apply_mode(Mode::new(Gen::Beta, 0), &st(&[(Gen::Gamma, -1)])), one);
        assert_eq!(apply_mode(Mode::new(Gen::B, 0), &st(&[(Gen::C, -1)])), one);
        assert!(apply_mode(Mode::new(Gen::Gamma, 5), &st(&[(Gen::C, -1)])).is_zero());
        assert!(apply_mode(Mode::new(Gen::Beta, 3), &one).is_zero());
    }

    #[test]
    fn fermionic_annihilation_sign() {
        // c(0) b(-2) b(-1) 1: contraction only with b(-1), after passing b(-2)
        let s = st(&[(Gen::B, -2), (Gen::B, -1)]);
        assert_eq!(apply_mode(Mode::new(Gen::C, 0), &s), -&st(&[(Gen::B, -2)]));
        assert_eq!(apply_mode(Mode::new(Gen::C, 1), &s), st(&[(Gen::B, -1)]));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(-1, 3), -1);
        assert_eq!(binomial(-2, 2), 3);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(-3, 0), 1);
    }

    #[test]
    fn q_zero_mode_on_b() {
        let b = generator(Gen::B);
        assert_eq!(nth_product(&q(), 0, &b), generator(Gen::Beta));
    }

    #[test]
    fn vacuum_is_identity_field() {
        let s = &st(&[(Gen::Beta, -2), (Gen::C, -1)]) + &st(&[(Gen::Gamma, -3)]);
        assert_eq!(nth_product(&State::vacuum(), -1, &s), s);
        assert!(nth_product(&State::vacuum(), 0, &s).is_zero());
    }

    #[test]
    fn beta_gamma_contraction() {
        let beta = generator(Gen::Beta);
        let gamma = generator(Gen::Gamma);
        assert_eq!(nth_product(&beta, 0, &gamma), State::vacuum());
        assert_eq!(nth_product(&gamma, 0, &beta), -&State::vacuum());
    }

    #[test]
    fn wick_examples() {
        let beta = generator(Gen::Beta);
        let c = generator(Gen::C);
        assert_eq!(wick(&beta, &c), q());
        assert_eq!(wick(&State::vacuum(), &q()), q());
    }

    #[test]
    fn fermion_quasi_commutativity() {
        // :bc: + :cb: = Σ_j (−1)^j ∂^{(j+1)}(b_(j) c) / ... ; here b_(0)c = 1, ∂1 = 0
        let b = generator(Gen::B);
        let c = generator(Gen::C);
        let bc = wick(&b, &c);
        let cb = wick(&c, &b);
        let correction = &bc + &cb;
        // the engine's correction term, derived from skew-symmetry: ∂(b_(0)c) = 0
        let skew = translate(&nth_product(&b, 0, &c));
        assert_eq!(correction, skew);
        assert!(correction.is_zero());
        assert_eq!(bc, st(&[(Gen::B, -1), (Gen::C, -1)]));
    }

    #[test]
    fn translation_examples() {
        assert!(translate(&State::vacuum()).is_zero());
        assert_eq!(translate(&generator(Gen::Gamma)), st(&[(Gen::Gamma, -2)]));
        assert_eq!(translate(&generator(Gen::Beta)), st(&[(Gen::Beta, -2)]));
        // b(-1)b(-2) shifts to 2 b(-3)b(-1) ... with reordering signs
        let s = st(&[(Gen::B, -2), (Gen::B, -1)]);
        assert_eq!(translate(&s), st(&[(Gen::B, -3), (Gen::B, -1)]).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn gradings() {
        assert_eq!(weight_charge(&q()), Grading::Homogeneous { weight: 1, charge: 1 });
        assert_eq!(weight_charge(&State::vacuum()), Grading::Homogeneous { weight: 0, charge: 0 });
        let mixed = &generator(Gen::Beta) + &generator(Gen::C);
        assert_eq!(weight_charge(&mixed), Grading::Inhomogeneous);
        assert_eq!(weight_charge_by_operators(&q()), Some((1, 1)));
        assert_eq!(nth_product(&current(), 0, &q()), q());
        assert_eq!(weight_charge_by_operators(&mixed), None);
    }

    #[test]
    fn named_field_parities() {
        assert_eq!(q().parity(), Some(true));
        assert_eq!(g().parity(), Some(true));
        assert_eq!(conformal().parity(), Some(false));
        assert_eq!(current().parity(), Some(false));
    }

    #[test]
    fn conformal_weight_on_generators() {
        for (gen, w) in [(Gen::Beta, 1), (Gen::Gamma, 0), (Gen::B, 1), (Gen::C, 0)] {
            let x = generator(gen);
            assert_eq!(weight_charge_by_operators(&x), Some((w, gen.charge())));
        }
        let d = st(&[(Gen::Gamma, -3), (Gen::C, -2), (Gen::B, -1)]);
        assert_eq!(weight_charge_by_operators(&d), Some((4, 0)));
    }
}
