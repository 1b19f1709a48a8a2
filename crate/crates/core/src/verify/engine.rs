//! Vertex-algebra axioms of the free-field engine, checked exactly on a
//! bounded set of basis states.

use std::time::Instant;

use rustc_hash::FxHashMap;

use crate::basis::{charge_range, enumerate_full};
use crate::engine::kernel::{Kernel, Lin, MonoId};
use crate::engine::{translate, Monomial, State};
use crate::report::Report;

/// Sweep domain of the engine suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineBounds {
    /// Maximal weight of the left field `a`.
    pub a_weight: i64,
    /// Maximal weight of the second field `b` and of the test vector `x`.
    pub bx_weight: i64,
    /// Mode indices run over `[-mode_range, mode_range]`.
    pub mode_range: i64,
    /// Maximal `γ(-1)`-degree of every basis state.
    pub gamma_degree: usize,
}

impl Default for EngineBounds {
    fn default() -> Self {
        EngineBounds {
            a_weight: 3,
            bx_weight: 2,
            mode_range: 3,
            gamma_degree: 2,
        }
    }
}

/// Homogeneous basis monomials of W(V) up to `max_weight`.
pub fn basis_states(max_weight: i64, gamma_degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=max_weight {
        for l in charge_range(k) {
            out.extend(enumerate_full(k, l, gamma_degree).monomials);
        }
    }
    out
}

fn render(kernel: &Kernel, lin: &[(MonoId, i64)]) -> String {
    kernel.to_state(lin).to_string()
}

fn mono_state(m: &Monomial) -> State {
    State::monomial(m.clone())
}

fn binom(m: i64, j: i64) -> i64 {
    i64::try_from(crate::engine::binomial(m, j)).expect("binomial out of range")
}

/// Dense accumulator over interned ids with a touched list.
#[derive(Default)]
struct Accumulator {
    slots: Vec<i64>,
    touched: Vec<MonoId>,
}

impl Accumulator {
    fn add(&mut self, id: MonoId, c: i64) {
        let i = id as usize;
        if i >= self.slots.len() {
            self.slots.resize(i + 1 + i / 2, 0);
        }
        if self.slots[i] == 0 {
            self.touched.push(id);
        }
        self.slots[i] = self.slots[i].checked_add(c).expect("coefficient overflow");
    }

    fn add_lin(&mut self, lin: &[(MonoId, i64)], scale: i64) {
        for &(id, c) in lin {
            self.add(id, scale.checked_mul(c).expect("coefficient overflow"));
        }
    }

    /// Drains the accumulator and returns the nonzero residue.
    fn drain(&mut self) -> Vec<(MonoId, i64)> {
        let mut out = Vec::new();
        for id in self.touched.drain(..) {
            let c = std::mem::take(&mut self.slots[id as usize]);
            if c != 0 {
                out.push((id, c));
            }
        }
        out.sort_unstable();
        out.dedup_by_key(|t| t.0);
        out
    }
}

/// `a_(n) 1 = 0` for `n ≥ 0`, `a_(-1) 1 = a`, and `1_(n) a = δ_{n,-1} a`.
pub fn verify_vacuum(bounds: &EngineBounds) -> Report {
    let mut report = Report::new("vacuum axioms");
    let mut kernel = Kernel::default();
    let one = kernel.vacuum();
    for am in basis_states(bounds.a_weight, bounds.gamma_degree) {
        let a = kernel.interner.intern(&am);
        let top = bounds.mode_range.max(am.weight() + 1);
        for n in -1..=top {
            let got = kernel.product(a, n, one);
            let want: Vec<(MonoId, i64)> = if n == -1 { vec![(a, 1)] } else { Vec::new() };
            report.check(*got == want[..], || {
                ("a_(n)1".into(), format!("a = {am}, n = {n}"), render(&kernel, &got), render(&kernel, &want))
            });
        }
        for n in -bounds.mode_range..=bounds.mode_range {
            let got = kernel.product(one, n, a);
            let want: Vec<(MonoId, i64)> = if n == -1 { vec![(a, 1)] } else { Vec::new() };
            report.check(*got == want[..], || {
                ("1_(n)a".into(), format!("a = {am}, n = {n}"), render(&kernel, &got), render(&kernel, &want))
            });
        }
    }
    report
}

/// `(∂a)_(n) = −n a_(n−1)` on basis vectors, and `∂a = a_(-2) 1`.
pub fn verify_translation(bounds: &EngineBounds) -> Report {
    let mut report = Report::new("translation compatibility");
    let mut kernel = Kernel::default();
    let one = kernel.vacuum();
    let xs: Vec<MonoId> = basis_states(bounds.bx_weight, bounds.gamma_degree)
        .iter()
        .map(|m| kernel.interner.intern(m))
        .collect();
    for am in basis_states(bounds.bx_weight, bounds.gamma_degree) {
        let a = kernel.interner.intern(&am);
        let ta = translate(&mono_state(&am));
        let ta_lin: Vec<(MonoId, i64)> = ta
            .iter()
            .map(|(m, c)| (kernel.interner.intern(m), c.as_i64().expect("integer coefficients")))
            .collect();
        let by_mode = kernel.product(a, -2, one);
        let mut acc = Accumulator::default();
        acc.add_lin(&ta_lin, 1);
        acc.add_lin(&by_mode, -1);
        let residue = acc.drain();
        report.check(residue.is_empty(), || {
            ("∂a = a_(-2)1".into(), format!("a = {am}"), ta.to_string(), render(&kernel, &by_mode))
        });
        for n in -bounds.mode_range..=bounds.mode_range {
            for &x in &xs {
                for &(t, c) in &ta_lin {
                    let p = kernel.product(t, n, x);
                    acc.add_lin(&p, c);
                }
                let q = kernel.product(a, n - 1, x);
                acc.add_lin(&q, n);
                let residue = acc.drain();
                report.check(residue.is_empty(), || {
                    (
                        "(∂a)_(n)x = −n a_(n−1)x".into(),
                        format!("a = {am}, n = {n}, x = {}", kernel.interner.get(x)),
                        format!("residue {}", render(&kernel, &residue)),
                        "0".to_string(),
                    )
                });
            }
        }
    }
    report
}

/// Every monomial of `a_(n) b` has weight `wt a + wt b − n − 1` and charge
/// `ch a + ch b`.
pub fn verify_grading(bounds: &EngineBounds) -> Report {
    let mut report = Report::new("grading additivity");
    let mut kernel = Kernel::default();
    let bs: Vec<Monomial> = basis_states(bounds.bx_weight, bounds.gamma_degree);
    for am in basis_states(bounds.a_weight, bounds.gamma_degree) {
        let a = kernel.interner.intern(&am);
        for bm in &bs {
            let b = kernel.interner.intern(bm);
            for n in -bounds.mode_range..=bounds.mode_range {
                let p = kernel.product(a, n, b);
                let weight = am.weight() + bm.weight() - n - 1;
                let charge = am.charge() + bm.charge();
                for &(t, _) in p.iter() {
                    let m = kernel.interner.get(t);
                    report.check(m.weight() == weight && m.charge() == charge, || {
                        (
                            "grading of a_(n)b".into(),
                            format!("a = {am}, n = {n}, b = {bm}"),
                            format!("({}, {}) at {m}", m.weight(), m.charge()),
                            format!("({weight}, {charge})"),
                        )
                    });
                }
            }
        }
        kernel.clear();
    }
    report
}

/// Cached light products kept between left fields.
const CACHE_CAP: usize = 3_000_000;

/// Commutator formula
/// `a_(m) b_(n) x − (−1)^{|a||b|} b_(n) a_(m) x = Σ_j C(m,j) (a_(j) b)_(m+n−j) x`
/// over the whole domain, stopping early at `deadline`.
pub fn verify_commutator(bounds: &EngineBounds, deadline: Option<Instant>) -> Report {
    let mut report = Report::new("commutator formula");
    let mut kernel = Kernel::default();
    let r = bounds.mode_range;
    let a_basis = basis_states(bounds.a_weight, bounds.gamma_degree);
    let b_basis = basis_states(bounds.bx_weight, bounds.gamma_degree);
    let bs: Vec<MonoId> = b_basis.iter().map(|m| kernel.interner.intern(m)).collect();
    let xs = bs.clone();
    let modes: Vec<i64> = (-r..=r).collect();

    // b_(n) x does not depend on a, so it survives the per-a cache reset
    let mut bx: FxHashMap<(MonoId, i64, MonoId), Lin> = FxHashMap::default();
    for &b in &bs {
        for &n in &modes {
            for &x in &xs {
                bx.insert((b, n, x), kernel.product(b, n, x));
            }
        }
    }

    let total = a_basis.len();
    let mut acc = Accumulator::default();
    for (done, am) in a_basis.iter().enumerate() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            report.incomplete = Some(format!(
                "deadline reached after {done} of {total} left fields ({:.1}% of the domain)",
                100.0 * done as f64 / total as f64
            ));
            break;
        }
        kernel.retain_light(bounds.bx_weight, CACHE_CAP);
        let a = kernel.interner.intern(am);
        let a_odd = am.is_odd();
        for (bi, &b) in bs.iter().enumerate() {
            let bm = &b_basis[bi];
            let sign: i64 = if a_odd && bm.is_odd() { -1 } else { 1 };
            // a_(j) b vanishes for j ≥ wt a + wt b
            let j_top = am.weight() + bm.weight() - 1;
            let ajb: Vec<Lin> = (0..=j_top.max(-1)).map(|j| kernel.product(a, j, b)).collect();
            for &m in &modes {
                let cm: Vec<i64> = (0..ajb.len() as i64).map(|j| binom(m, j)).collect();
                for &n in &modes {
                    for &x in &xs {
                        for &(y, c) in bx[&(b, n, x)].iter() {
                            let p = kernel.product(a, m, y);
                            acc.add_lin(&p, c);
                        }
                        let ax = kernel.product(a, m, x);
                        for &(y, c) in ax.iter() {
                            let p = kernel.product(b, n, y);
                            acc.add_lin(&p, -sign * c);
                        }
                        for (j, w) in ajb.iter().enumerate() {
                            let cj = cm[j];
                            let j = j as i64;
                            if cj == 0 {
                                continue;
                            }
                            for &(t, e) in w.iter() {
                                let p = kernel.product(t, m + n - j, x);
                                acc.add_lin(&p, -cj * e);
                            }
                        }
                        let residue = acc.drain();
                        report.check(residue.is_empty(), || {
                            (
                                "commutator formula".into(),
                                format!("a = {am}, m = {m}, b = {bm}, n = {n}, x = {}", kernel.interner.get(x)),
                                format!("lhs − rhs = {}", render(&kernel, &residue)),
                                "0".to_string(),
                            )
                        });
                    }
                }
            }
        }
    }
    report
}

/// Vacuum, translation and grading checks, then the commutator sweep.
pub fn verify_engine(bounds: &EngineBounds, deadline: Option<Instant>) -> Report {
    let mut report = Report::new("engine axioms");
    report.merge(verify_vacuum(bounds));
    report.merge(verify_translation(bounds));
    report.merge(verify_grading(bounds));
    report.merge(verify_commutator(bounds, deadline));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EngineBounds {
        EngineBounds {
            a_weight: 1,
            bx_weight: 1,
            mode_range: 2,
            gamma_degree: 1,
        }
    }

    #[test]
    fn domain_sizes() {
        assert_eq!(basis_states(0, 2).len(), 6);
        assert_eq!(basis_states(2, 2).len(), 102);
        assert_eq!(basis_states(3, 2).len(), 294);
    }

    #[test]
    fn small_domain_passes() {
        let b = small();
        for r in [verify_vacuum(&b), verify_translation(&b), verify_grading(&b), verify_commutator(&b, None)] {
            assert!(r.passed(), "{r}");
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn expired_deadline_is_reported() {
        let r = verify_commutator(&small(), Some(Instant::now()));
        assert!(!r.passed());
        assert!(r.incomplete.is_some());
        assert!(r.failures.is_empty());
    }

    #[test]
    fn accumulator_cancels() {
        let mut acc = Accumulator::default();
        acc.add(3, 2);
        acc.add(5, 1);
        acc.add(3, -2);
        assert_eq!(acc.drain(), vec![(5, 1)]);
        assert!(acc.drain().is_empty());
    }
}
