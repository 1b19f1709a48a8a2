//! Cross-checks between the two sl₂ implementations and the invariant spaces.

use crate::basis::{charge_range, enumerate_basis, enumerate_full, split_by_s, GradedBasis, GradedKey};
use crate::engine::{Grading, State};
use crate::report::Report;
use crate::sl2::{invariants, kernel_by_l, kernel_by_lplus, verify_relation_l, verify_sl2_bracket, LplusOperators, Sl2Action, Sl2Generator};

/// Kernels of the three 𝓛 and the three 𝓛⁺ on `enumerate_full(k, l, 2)`
/// coincide, lie in W₊, and match `invariants(k, l)`.
pub fn verify_kernel_equivalence(kmax: i64) -> Report {
    let mut report = Report::new(format!("kernel equivalence (K ≤ {kmax})"));
    for k in 0..=kmax {
        for l in charge_range(k) {
            let by_l = kernel_by_l(k, l, 2);
            let by_lplus = kernel_by_lplus(k, l, 2);
            let at = format!("[{k}, {l}]");
            report.check(super::same_span(&by_l, &by_lplus), || {
                ("ker L = ker L+".into(), at.clone(), format!("{} vectors", by_l.len()), format!("{} vectors", by_lplus.len()))
            });
            for v in by_l.iter().chain(&by_lplus) {
                report.check(v.monomials().all(|m| m.is_plus()), || ("kernel vector is γ(-1)-free".into(), at.clone(), v, "W₊ element"));
            }
            match invariants(k, l) {
                Ok(space) => report.check(super::same_span(&space.basis, &by_l), || {
                    ("invariants(k, l) = ker L".into(), at.clone(), space.dimension(), by_l.len())
                }),
                Err(e) => report.check(false, || ("invariants(k, l)".into(), at.clone(), e, "kernel")),
            }
        }
    }
    for (k, l, want) in [(0, 0, 1), (0, 1, 0)] {
        let got = invariants(k, l).map(|s| s.dimension());
        report.check(got == Ok(want), || ("dim W^T".into(), format!("[{k}, {l}]"), format!("{got:?}"), want));
    }
    report
}

/// `𝓛⁺(x∂x)` is diagonal on W₊ monomials with kernel `#β + #b = #γ + #c`.
pub fn verify_diagonality(kmax: i64) -> Report {
    use crate::engine::Gen;
    let mut report = Report::new(format!("diagonality of L+(x d/dx) (K ≤ {kmax})"));
    for k in 0..=kmax {
        let ops = LplusOperators::new(k);
        for l in charge_range(k) {
            for m in enumerate_basis(k, l).monomials {
                let a = State::monomial(m.clone());
                let image = ops.apply(Sl2Generator::ALL[1], &a).expect("weight within bound");
                let c = image.coeff(&m);
                let diagonal = image == a.scale(&c);
                report.check(diagonal, || ("L+(x d/dx) is diagonal".into(), m.to_string(), &image, a.scale(&c)));
                let balanced = m.count(Gen::Beta) + m.count(Gen::B) == m.count(Gen::Gamma) + m.count(Gen::C);
                report.check(image.is_zero() == balanced, || {
                    ("kernel iff #β + #b = #γ + #c".into(), m.to_string(), &image, if balanced { "0" } else { "nonzero" })
                });
            }
        }
    }
    report
}

/// Invariant states only involve `s`-blocks with `|s| ≤ k`.
pub fn verify_s_bound(kmax: i64) -> Report {
    let mut report = Report::new(format!("s-bound of invariants (K ≤ {kmax})"));
    for k in 0..=kmax {
        for l in charge_range(k) {
            let Ok(space) = invariants(k, l) else {
                report.check(false, || ("invariants(k, l)".into(), format!("[{k}, {l}]"), "error", "space"));
                continue;
            };
            for v in &space.basis {
                let basis = GradedBasis {
                    key: GradedKey::new(k, l),
                    monomials: v.monomials().cloned().collect(),
                };
                let blocks = split_by_s(&basis);
                report.check(blocks.keys().all(|s| s.abs() <= k), || {
                    ("s-blocks of an invariant".into(), v.to_string(), format!("{:?}", blocks.keys().collect::<Vec<_>>()), format!("|s| ≤ {k}"))
                });
            }
        }
    }
    report
}

/// `𝓛` and `𝓛⁺` preserve `(k, l)`.
pub fn verify_gradedness(kmax: i64) -> Report {
    let mut report = Report::new(format!("sl2 gradedness (K ≤ {kmax})"));
    let mut action = Sl2Action::new();
    for k in 0..=kmax {
        let ops = LplusOperators::new(k);
        for l in charge_range(k) {
            for m in enumerate_full(k, l, 2).monomials {
                let a = State::monomial(m.clone());
                for i in Sl2Generator::ALL {
                    let want = Grading::Homogeneous { weight: k, charge: l };
                    for (name, image) in [("L", action.apply(i, &a)), ("L+", ops.apply(i, &a).expect("weight within bound"))] {
                        let ok = image.is_zero() || image.grading() == want;
                        report.check(ok, || (format!("{name}({i}) preserves (k, l)"), m.to_string(), format!("{:?}", image.grading()), format!("{want:?}")));
                    }
                }
            }
        }
    }
    report
}

/// Every sl₂ check at its default size.
pub fn sl2_reports() -> Vec<Report> {
    vec![
        verify_relation_l(3, 2),
        verify_sl2_bracket(3),
        verify_kernel_equivalence(4),
        verify_diagonality(4),
        verify_s_bound(4),
        verify_gradedness(3),
    ]
}

