//! Interned integer kernel behind [`super::ProductCache`].
//!
//! Monomial-level products of generator monomials have integer
//! coefficients, so the recursion runs on `(id, i64)` lists and only the
//! public wrappers convert to [`State`].

use std::rc::Rc;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use smallvec::SmallVec;

use super::{Mode, ModeVec, Monomial, State};

pub(crate) type MonoId = u32;
pub(crate) type Lin = Rc<[(MonoId, i64)]>;

struct Meta {
    weight: i64,
    odd: bool,
    first: Option<(Mode, MonoId)>,
}

#[derive(Default)]
pub(crate) struct Interner {
    ids: FxHashMap<Monomial, MonoId>,
    monos: Vec<Monomial>,
    meta: Vec<Meta>,
}

impl Interner {
    pub(crate) fn intern(&mut self, m: &Monomial) -> MonoId {
        if let Some(&id) = self.ids.get(m) {
            return id;
        }
        // suffixes are interned first so the recursion never misses
        let first = m.split_first().map(|(u, rest)| (u, self.intern(&rest)));
        let id = MonoId::try_from(self.monos.len()).expect("interner overflow");
        self.meta.push(Meta {
            weight: m.weight(),
            odd: m.is_odd(),
            first,
        });
        self.monos.push(m.clone());
        self.ids.insert(m.clone(), id);
        id
    }

    pub(crate) fn get(&self, id: MonoId) -> &Monomial {
        &self.monos[id as usize]
    }

    pub(crate) fn weight(&self, id: MonoId) -> i64 {
        self.meta[id as usize].weight
    }

    pub(crate) fn is_odd(&self, id: MonoId) -> bool {
        self.meta[id as usize].odd
    }
}

pub(crate) struct Kernel {
    pub(crate) interner: Interner,
    products: FxHashMap<(MonoId, i64, MonoId), Lin>,
    modes: FxHashMap<(Mode, MonoId), Lin>,
    empty: Lin,
    vacuum: MonoId,
}

impl Default for Kernel {
    fn default() -> Self {
        let mut interner = Interner::default();
        let vacuum = interner.intern(&Monomial::vacuum());
        Kernel {
            interner,
            products: FxHashMap::default(),
            modes: FxHashMap::default(),
            empty: Rc::from(Vec::new()),
            vacuum,
        }
    }
}

fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("coefficient overflow")
}

/// `(−1)^j C(p, j)` via the multiplicative recurrence, exact for negative `p`.
fn signed_binomials(p: i64, j_max: i64) -> impl Iterator<Item = (i64, i64)> {
    let mut c: i64 = 1;
    (0..=j_max).map(move |j| {
        if j > 0 {
            c = mul(c, p - j + 1) / j;
        }
        (j, if j % 2 == 0 { c } else { -c })
    })
}

pub(crate) fn normalize_lin(mut acc: Vec<(MonoId, i64)>) -> Vec<(MonoId, i64)> {
    acc.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(MonoId, i64)> = Vec::with_capacity(acc.len());
    for (id, c) in acc {
        match out.last_mut() {
            Some(last) if last.0 == id => {
                last.1 = last.1.checked_add(c).expect("coefficient overflow");
            }
            _ => out.push((id, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

impl Kernel {
    pub(crate) fn products_len(&self) -> usize {
        self.products.len()
    }

    pub(crate) fn clear(&mut self) {
        self.products.clear();
        self.modes.clear();
    }

    /// Drops cached products whose left factor is heavier than `max_weight`,
    /// or everything once more than `cap` entries remain.
    pub(crate) fn retain_light(&mut self, max_weight: i64, cap: usize) {
        let interner = &self.interner;
        self.products.retain(|&(a, _, _), _| interner.weight(a) <= max_weight);
        if self.products.len() > cap {
            self.clear();
        }
    }

    pub(crate) fn vacuum(&self) -> MonoId {
        self.vacuum
    }

    /// Single generator mode on a monomial.
    pub(crate) fn apply_mode(&mut self, mode: Mode, b: MonoId) -> Lin {
        if let Some(hit) = self.modes.get(&(mode, b)) {
            return hit.clone();
        }
        let mut out: SmallVec<[(Monomial, i64); 8]> = SmallVec::new();
        {
            let m = self.interner.get(b);
            let modes = m.modes();
            if mode.is_creation() {
                let pos = modes.partition_point(|x| *x < mode);
                if !(mode.is_odd() && modes.get(pos) == Some(&mode)) {
                    let passed_odd = modes[..pos].iter().filter(|x| x.is_odd()).count();
                    let sign = if mode.is_odd() && passed_odd % 2 == 1 { -1 } else { 1 };
                    let mut v: ModeVec = SmallVec::with_capacity(modes.len() + 1);
                    v.extend_from_slice(&modes[..pos]);
                    v.push(mode);
                    v.extend_from_slice(&modes[pos..]);
                    out.push((Monomial::from_sorted(v), sign));
                }
            } else {
                let mut sign = 1;
                for (i, y) in modes.iter().enumerate() {
                    let c = mode.contraction(*y);
                    // equal neighbours give the same monomial; merge below
                    if c != 0 {
                        out.push((m.without(i), sign * c));
                    }
                    if mode.is_odd() && y.is_odd() {
                        sign = -sign;
                    }
                }
            }
        }
        let lin: Vec<(MonoId, i64)> = out
            .into_iter()
            .map(|(m, c)| (self.interner.intern(&m), c))
            .collect();
        let lin: Lin = if lin.is_empty() {
            self.empty.clone()
        } else {
            Rc::from(normalize_lin(lin))
        };
        self.modes.insert((mode, b), lin.clone());
        lin
    }

    /// `a_(n) b` for interned monomials.
    pub(crate) fn product(&mut self, a: MonoId, n: i64, b: MonoId) -> Lin {
        let Some((u, v)) = self.interner.meta[a as usize].first else {
            return if n == -1 {
                Rc::from(vec![(b, 1)])
            } else {
                self.empty.clone()
            };
        };
        let wa = self.interner.weight(a);
        let wb = self.interner.weight(b);
        // a_(n) b has weight wt(a) + wt(b) − n − 1 ≥ 0
        if wa + wb - n - 1 < 0 {
            return self.empty.clone();
        }
        if v == self.vacuum && u.index == -1 {
            return self.apply_mode(Mode::new(u.gen, n as i32), b);
        }
        if let Some(hit) = self.products.get(&(a, n, b)) {
            return hit.clone();
        }

        let p = u.index as i64;
        let eps: i64 = if (p.rem_euclid(2) == 1) ^ (u.is_odd() && self.interner.is_odd(v)) {
            -1
        } else {
            1
        };
        let wv = self.interner.weight(v);
        let mut acc: Vec<(MonoId, i64)> = Vec::new();

        // Σ_j (−1)^j C(p,j) u_(p−j) v_(n+j) b
        for (j, c) in signed_binomials(p, wv + wb - 1 - n) {
            if c == 0 {
                continue;
            }
            let inner = self.product(v, n + j, b);
            for &(t, ct) in inner.iter() {
                let moved = self.apply_mode(Mode::new(u.gen, (p - j) as i32), t);
                for &(t2, c2) in moved.iter() {
                    acc.push((t2, mul(mul(c, ct), c2)));
                }
            }
        }

        // − (−1)^{p+|u||v|} Σ_j (−1)^j C(p,j) v_(p+n−j) u_(j) b
        for (j, c) in signed_binomials(p, u.gen.field_weight() + wb - 1) {
            if c == 0 {
                continue;
            }
            let ub = self.apply_mode(Mode::new(u.gen, j as i32), b);
            for &(t, ct) in ub.iter() {
                let inner = self.product(v, p + n - j, t);
                for &(t2, c2) in inner.iter() {
                    acc.push((t2, mul(mul(-eps * c, ct), c2)));
                }
            }
        }

        let acc = normalize_lin(acc);
        let lin: Lin = if acc.is_empty() { self.empty.clone() } else { Rc::from(acc) };
        self.products.insert((a, n, b), lin.clone());
        lin
    }

    pub(crate) fn to_state(&self, lin: &[(MonoId, i64)]) -> State {
        lin.iter()
            .map(|&(id, c)| (self.interner.get(id).clone(), c.into()))
            .filter(|(_, c): &(Monomial, crate::Scalar)| !c.is_zero())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::binomial;

    #[test]
    fn binomial_recurrence_matches_falling_factorial() {
        for p in -8..=8 {
            for (j, c) in signed_binomials(p, 10) {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                assert_eq!(c as i128, sign * binomial(p, j), "C({p},{j})");
            }
        }
    }

    #[test]
    fn suffixes_are_interned() {
        let mut k = Kernel::default();
        let m = State::from_modes(&[
            Mode::new(super::super::Gen::Beta, -2),
            Mode::new(super::super::Gen::C, -1),
        ]);
        let mono = m.monomials().next().unwrap().clone();
        let before = k.interner.monos.len();
        k.interner.intern(&mono);
        assert_eq!(k.interner.monos.len(), before + 2);
    }
}
