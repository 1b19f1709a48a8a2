use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use super::mode::{Mode, Monomial};
use crate::scalar::Scalar;

/// A finite linear combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct State {
    terms: BTreeMap<Monomial, Scalar>,
}

/// Grading of a state: homogeneous `(weight, charge)` or mixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Homogeneous { weight: i64, charge: i64 },
    Inhomogeneous,
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    pub fn vacuum() -> Self {
        State::monomial(Monomial::vacuum())
    }

    pub fn monomial(m: Monomial) -> Self {
        State::term(m, Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    /// Product of creation modes on the vacuum, normal-ordered with sign.
    ///
    /// Panics if a mode is not a creation mode; see [`super::normalize`]
    /// for the fallible form.
    pub fn from_modes(modes: &[Mode]) -> Self {
        super::normalize(modes, 1).expect("creation modes only")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Monomial, Scalar> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &State, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> State {
        let mut out = State::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::weight).max()
    }

    pub fn grading(&self) -> Grading {
        let mut it = self.terms.keys().map(|m| (m.weight(), m.charge()));
        let Some(first) = it.next() else {
            return Grading::Homogeneous {
                weight: 0,
                charge: 0,
            };
        };
        if it.all(|g| g == first) {
            Grading::Homogeneous {
                weight: first.0,
                charge: first.1,
            }
        } else {
            Grading::Inhomogeneous
        }
    }

    /// Parity when all monomials agree.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }
}

impl FromIterator<(Monomial, Scalar)> for State {
    fn from_iter<I: IntoIterator<Item = (Monomial, Scalar)>>(iter: I) -> Self {
        let mut s = State::zero();
        for (m, c) in iter {
            s.add_term(m, c);
        }
        s
    }
}

impl Add<&State> for &State {
    type Output = State;
    fn add(self, rhs: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Sub<&State> for &State {
    type Output = State;
    fn sub(self, rhs: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::from_int(-1));
        out
    }
}

impl Neg for &State {
    type Output = State;
    fn neg(self) -> State {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if c.is_real() || c.re.is_zero() => (true, rest.to_string()),
                _ => (false, text),
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if body == "1" {
                write!(f, "{m}")?;
            } else if c.is_real() || c.re.is_zero() {
                write!(f, "{body}·{m}")?;
            } else {
                write!(f, "({body})·{m}")?;
            }
        }
        Ok(())
    }
}
