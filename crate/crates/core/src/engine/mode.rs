use std::fmt;

use smallvec::SmallVec;

use super::EngineError;

/// Generators of the βγ–bc system, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Beta,
    Gamma,
    B,
    C,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::Beta, Gen::Gamma, Gen::B, Gen::C];

    pub fn is_odd(self) -> bool {
        matches!(self, Gen::B | Gen::C)
    }

    /// Conformal weight of the generating field.
    pub fn field_weight(self) -> i64 {
        match self {
            Gen::Beta | Gen::B => 1,
            Gen::Gamma | Gen::C => 0,
        }
    }

    /// Fermion number of the generating field.
    pub fn charge(self) -> i64 {
        match self {
            Gen::C => 1,
            Gen::B => -1,
            _ => 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Gen::Beta => "β",
            Gen::Gamma => "γ",
            Gen::B => "b",
            Gen::C => "c",
        }
    }
}

/// A single mode `gen_(index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub gen: Gen,
    pub index: i32,
}

impl Mode {
    pub const fn new(gen: Gen, index: i32) -> Self {
        Mode { gen, index }
    }

    pub fn is_creation(self) -> bool {
        self.index < 0
    }

    pub fn is_odd(self) -> bool {
        self.gen.is_odd()
    }

    /// Weight added when this mode is applied (negative for annihilators).
    pub fn weight_shift(self) -> i64 {
        self.gen.field_weight() - self.index as i64 - 1
    }

    /// Supercommutator `[self, other]`, a multiple of the identity.
    pub fn contraction(self, other: Mode) -> i64 {
        if self.index + other.index + 1 != 0 {
            return 0;
        }
        match (self.gen, other.gen) {
            (Gen::Beta, Gen::Gamma) => 1,
            (Gen::Gamma, Gen::Beta) => -1,
            (Gen::B, Gen::C) | (Gen::C, Gen::B) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.gen.symbol(), self.index)
    }
}

pub type ModeVec = SmallVec<[Mode; 8]>;

/// A canonically ordered product of creation modes applied to the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(ModeVec);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds a monomial from modes that are already canonical.
    pub(crate) fn from_sorted(modes: ModeVec) -> Self {
        debug_assert!(is_canonical(&modes));
        Monomial(modes)
    }

    /// Canonicalises a sequence of creation modes. Returns the reordering
    /// sign, or `None` when an odd mode repeats.
    pub fn canonicalize(mut modes: ModeVec) -> Option<(Monomial, i64)> {
        let mut sign = 1;
        // insertion sort; odd/odd transpositions flip the sign
        for i in 1..modes.len() {
            let mut j = i;
            while j > 0 && modes[j - 1] > modes[j] {
                if modes[j - 1].is_odd() && modes[j].is_odd() {
                    sign = -sign;
                }
                modes.swap(j - 1, j);
                j -= 1;
            }
        }
        if modes.windows(2).any(|w| w[0] == w[1] && w[0].is_odd()) {
            return None;
        }
        Some((Monomial(modes), sign))
    }

    pub fn parse_modes(raw: &[Mode]) -> Result<Option<(Monomial, i64)>, EngineError> {
        if let Some(m) = raw.iter().find(|m| !m.is_creation()) {
            return Err(EngineError::AnnihilationMode(*m));
        }
        Ok(Monomial::canonicalize(raw.iter().copied().collect()))
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|m| m.weight_shift()).sum()
    }

    pub fn charge(&self) -> i64 {
        self.0.iter().map(|m| m.gen.charge()).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|m| m.is_odd()).count() % 2 == 1
    }

    pub fn count(&self, gen: Gen) -> usize {
        self.0.iter().filter(|m| m.gen == gen).count()
    }

    /// Number of `γ(-1)` factors.
    pub fn gamma_degree(&self) -> usize {
        self.0
            .iter()
            .filter(|m| m.gen == Gen::Gamma && m.index == -1)
            .count()
    }

    /// Lies in W₊, i.e. has no `γ(-1)` factor.
    pub fn is_plus(&self) -> bool {
        self.gamma_degree() == 0
    }

    /// `#β − #γ`, counting only γ-modes of index ≤ −2.
    pub fn s_grade(&self) -> i64 {
        let beta = self.count(Gen::Beta) as i64;
        let gamma = (self.count(Gen::Gamma) - self.gamma_degree()) as i64;
        beta - gamma
    }

    /// Splits off the canonically first mode.
    pub fn split_first(&self) -> Option<(Mode, Monomial)> {
        let (first, rest) = self.0.split_first()?;
        Some((*first, Monomial(rest.iter().copied().collect())))
    }

    pub(crate) fn without(&self, pos: usize) -> Monomial {
        let mut v = self.0.clone();
        v.remove(pos);
        Monomial(v)
    }
}

fn is_canonical(modes: &[Mode]) -> bool {
    modes
        .windows(2)
        .all(|w| w[0] < w[1] || (w[0] == w[1] && !w[0].is_odd()))
        && modes.iter().all(|m| m.is_creation())
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let modes = &self.0;
        while i < modes.len() {
            let mut j = i;
            while j < modes.len() && modes[j] == modes[i] {
                j += 1;
            }
            write!(f, "{}", modes[i])?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            i = j;
        }
        write!(f, "1")
    }
}
