//! Identities of the half-plane calculus, checked symbolically in the chart.

use std::collections::BTreeSet;

use num_traits::One;

use crate::basis::{charge_range, enumerate_basis, s_block, split_by_s};
use crate::engine::{Monomial, State};
use crate::halfplane::{
    case3_kernel, curvature_op, d_bar, dbar_prime, dbar_prime_by_factors, dbar_star, f1, f2, gamma2,
    metric_data, n1, nabla_gamma, nabla_gamma_bar, recursion_residuals, seed_section,
    seed_section_with, solve_recursion, ChartFn, FormSection,
};
use crate::report::Report;
use crate::scalar::Scalar;
use crate::sl2::{kernel_states, lplus_operator, Sl2Generator};

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn sum(parts: &[FormSection]) -> FormSection {
    parts.iter().fold(FormSection::zero(), |acc, p| &acc + p)
}

/// W₊ monomials of weight at most `kmax`, over every charge.
pub fn plus_monomials(kmax: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=kmax {
        for l in charge_range(k) {
            out.extend(enumerate_basis(k, l).monomials);
        }
    }
    out
}

/// Coefficients used to probe operators that act on the chart factor.
fn probe_coefficients() -> Vec<ChartFn> {
    vec![
        ChartFn::constant(Scalar::one()),
        ChartFn::u(),
        &ChartFn::v_pow(-1) + &ChartFn::u_pow(2),
        &ChartFn::term(Scalar::i(), 1, 3) + &ChartFn::v_pow(2),
    ]
}

/// `H`, `H⁻¹`, `θ`, `B_(0)θ` and `−iH⁻¹` in the `(u, v)` normal form.
pub fn verify_constants() -> Report {
    let mut report = Report::new("metric constants");
    let md = metric_data();
    let i = Scalar::i();
    let expected = [
        ("H", &md.h, ChartFn::term(&int(-2) * &i, 0, -2)),
        ("H⁻¹", &md.h_inv, ChartFn::term(&i * &Scalar::ratio(1, 2), 0, 2)),
        ("θ coefficient", &md.theta_coeff, ChartFn::term(int(-2), 0, -1)),
        ("B_(0)θ", &md.b0_theta, ChartFn::constant(i.clone())),
        ("−iH⁻¹", &md.neg_i_h_inv, ChartFn::term(Scalar::ratio(1, 2), 0, 2)),
        ("(Im γ)²", &md.im_sq, ChartFn::term(Scalar::ratio(-1, 4), 0, 2)),
        ("H·H⁻¹", &(&md.h * &md.h_inv), ChartFn::constant(Scalar::one())),
    ];
    for (name, got, want) in expected {
        report.check(*got == want, || (name.to_string(), "chart".to_string(), got.clone(), want));
    }
    report
}

/// `split_by_s` yields a nonempty `[k, l, s]` block exactly when `|s| ≤ k`,
/// taking the union over all charges `l`.
pub fn verify_emptiness(kmax: i64) -> Report {
    let mut report = Report::new(format!("emptiness law (K ≤ {kmax})"));
    for k in 0..=kmax {
        let mut seen = BTreeSet::new();
        for l in charge_range(k) {
            let basis = enumerate_basis(k, l);
            let blocks = split_by_s(&basis);
            let total: usize = blocks.values().map(|b| b.len()).sum();
            report.check(total == basis.len(), || {
                ("blocks partition the basis".into(), format!("[{k}, {l}]"), total, basis.len())
            });
            for (s, block) in &blocks {
                report.check(!block.is_empty() && s.abs() <= k, || {
                    ("nonempty block has |s| ≤ k".into(), format!("[{k}, {l}, {s}]"), block.len(), "k ≥ |s|")
                });
                seen.insert(*s);
            }
            // forced-empty blocks reported by the direct accessor
            for s in [-k - 1, k + 1] {
                let block = s_block(k, l, s);
                report.check(block.is_empty(), || {
                    ("block with k < |s| is empty".into(), format!("[{k}, {l}, {s}]"), block.len(), 0)
                });
            }
        }
        let want: BTreeSet<i64> = (-k..=k).collect();
        report.check(seen == want, || {
            ("occupied s-values are exactly [−k, k]".into(), format!("k = {k}"), format!("{seen:?}"), format!("{want:?}"))
        });
    }
    report
}

/// `curvature_op`, computed from the connection, acts as `(l − s)` on every
/// W₊ monomial of weight at most `kmax`.
pub fn verify_curvature(kmax: i64) -> Report {
    let mut report = Report::new(format!("curvature eigenvalue (K ≤ {kmax})"));
    let coeffs = probe_coefficients();
    for m in plus_monomials(kmax) {
        let eigen = m.charge() - m.s_grade();
        for f in &coeffs {
            let sec = FormSection::function(&State::monomial(m.clone()), f);
            let want = sec.scale(&int(eigen));
            match curvature_op(&sec) {
                Ok(got) => report.check(got == want, || ("curvature = (l − s)".into(), format!("{m} ⊗ [{f}]"), got, want)),
                Err(e) => report.check(false, || ("curvature = (l − s)".into(), format!("{m} ⊗ [{f}]"), e, want)),
            }
        }
    }
    report
}

/// Recursion sweep over every monomial seed with `l − s ∈ {1, 2}` and
/// weight at most `kmax`.
pub fn verify_recursion(kmax: i64) -> Report {
    let mut report = Report::new(format!("recursion (K ≤ {kmax}, l − s ∈ {{1, 2}})"));
    let mut with_lower_terms = 0;
    for m in plus_monomials(kmax) {
        let (k, l, s) = (m.weight(), m.charge(), m.s_grade());
        if !(1..=2).contains(&(l - s)) {
            continue;
        }
        for g in [ChartFn::constant(Scalar::one()), ChartFn::u()] {
            let seed = seed_section_with(&m, &g).expect("l ≥ s");
            let input = format!("{m} ⊗ [{}]", seed.deg0.values().next().expect("nonzero seed"));
            report.check(dbar_prime(&seed).is_zero(), || ("seed is holomorphic".into(), input.clone(), dbar_prime(&seed), 0));

            // harmonicity driver: ∂̄′ ∂̄′* F₁ a_s = (l − s) F₁ a_s
            let f1a = f1(&seed);
            let lhs = dbar_prime(&dbar_star(&f1a).expect("F₁ output is a (0,1)-form"));
            let rhs = f1a.scale(&int(l - s));
            report.check(lhs == rhs, || ("∂̄′∂̄′*F₁a = (l − s)F₁a".into(), input.clone(), lhs, rhs));

            let parts = match solve_recursion(&seed, l, s) {
                Ok(parts) => parts,
                Err(e) => {
                    report.check(false, || ("recursion runs".into(), input.clone(), e, "solution"));
                    continue;
                }
            };
            let steps = parts.len() as i64 - 1;
            if steps > 0 {
                with_lower_terms += 1;
            }
            report.check(steps <= k + s + 1, || ("t ≤ k + s + 1".into(), input.clone(), steps, k + s + 1));
            for (t, p) in parts.iter().enumerate() {
                let want = Some(crate::basis::GradedKey::with_s(k, l, s - t as i64));
                report.check(p.is_zero() || p.key() == want, || {
                    (format!("a_(s−{t}) lies in [k, l, s − {t}]"), input.clone(), format!("{:?}", p.key()), format!("{want:?}"))
                });
            }
            for (t, r) in recursion_residuals(&parts).iter().enumerate() {
                report.check(r.is_zero(), || (format!("step identity t = {t}"), input.clone(), r.clone(), 0));
            }
            let total = d_bar(&sum(&parts));
            report.check(total.is_zero(), || ("D̄(Σ a_(s−t)) = 0".into(), input.clone(), total, 0));
        }
    }
    if kmax >= 1 {
        report.check(with_lower_terms > 0, || ("some seed needs lower terms".into(), format!("K ≤ {kmax}"), with_lower_terms, "> 0"));
    }
    report
}

/// Constant sections on the diagonal blocks `[k, s, s]`.
pub fn verify_case3(kmax: i64, kernel_kmax: i64) -> Report {
    let mut report = Report::new(format!("diagonal blocks (K ≤ {kmax}, kernels K ≤ {kernel_kmax})"));
    let one = ChartFn::constant(Scalar::one());
    for k in 0..=kmax.max(kernel_kmax) {
        for s in -k..=k {
            let block = s_block(k, s, s).monomials;
            if k <= kmax {
                for m in &block {
                    let sec = FormSection::function(&State::monomial(m.clone()), &one);
                    let a = f2(&sec);
                    report.check(a.is_zero(), || ("F₂(A ⊗ 1) = 0".into(), m.to_string(), a, 0));
                    let b = dbar_prime(&sec);
                    report.check(b.is_zero(), || ("∂̄′(A ⊗ 1) = 0".into(), m.to_string(), b, 0));
                }
            }
            if k > kernel_kmax {
                continue;
            }
            let by_n1: Vec<State> = block.iter().map(|m| n1(&State::monomial(m.clone()))).collect();
            let lplus = lplus_operator(Sl2Generator::ALL[2], k);
            let by_lplus: Vec<State> = block
                .iter()
                .map(|m| lplus.apply(&State::monomial(m.clone())).expect("weight within bound"))
                .collect();
            let ker_n1 = kernel_states(&block, &[by_n1]);
            let ker_lplus = kernel_states(&block, &[by_lplus]);
            report.check(super::same_span(&ker_n1, &ker_lplus), || {
                (
                    "ker N₁ = ker L+(x² d/dx)".into(),
                    format!("[{k}, {s}, {s}]"),
                    format!("{} vectors", ker_n1.len()),
                    format!("{} vectors", ker_lplus.len()),
                )
            });
            match case3_kernel(k, s) {
                Ok(kernel) => {
                    report.check(super::same_span(&kernel, &ker_n1), || {
                        ("case-3 kernel matches ker N₁".into(), format!("[{k}, {s}, {s}]"), kernel.len(), ker_n1.len())
                    });
                    for a in &kernel {
                        let out = d_bar(&FormSection::function(a, &one));
                        report.check(out.is_zero(), || ("D̄(A ⊗ 1) = 0".into(), a.to_string(), out, 0));
                    }
                }
                Err(e) => report.check(false, || ("case-3 kernel".into(), format!("[{k}, {s}, {s}]"), e, "closed")),
            }
        }
    }
    report
}

/// `F₁` and `F₂` lower `s` by one and two and keep `(k, l)`.
pub fn verify_f_grading(kmax: i64) -> Report {
    let mut report = Report::new(format!("F-grading (K ≤ {kmax})"));
    let f = &ChartFn::u_pow(2) + &ChartFn::v();
    for m in plus_monomials(kmax) {
        let (k, l, s) = (m.weight(), m.charge(), m.s_grade());
        let sec = FormSection::function(&State::monomial(m.clone()), &f);
        for (name, out, drop) in [("F₁", f1(&sec), 1), ("F₂", f2(&sec), 2)] {
            let want = crate::basis::GradedKey::with_s(k, l, s - drop);
            let ok = out.deg0.is_empty() && out.deg1.keys().all(|x| x.weight() == k && x.charge() == l && x.s_grade() == s - drop);
            report.check(ok, || (format!("{name} shifts s by −{drop}"), m.to_string(), format!("{:?}", out.key()), format!("{want:?}")));
        }
    }
    report
}

/// `F₁` commutes with `∇_γ`, and with `∇_γ̄` once the `dγ̄` twist is
/// accounted for.
pub fn verify_f1_commutes(kmax: i64) -> Report {
    let mut report = Report::new(format!("F₁ commutes with the connection (K ≤ {kmax})"));
    for m in plus_monomials(kmax) {
        for f in probe_coefficients() {
            let sec = FormSection::function(&State::monomial(m.clone()), &f);
            let input = format!("{m} ⊗ [{f}]");
            let a = nabla_gamma(&f1(&sec));
            let b = f1(&nabla_gamma(&sec));
            report.check(a == b, || ("∇_γ F₁ = F₁ ∇_γ".into(), input.clone(), a, b));
            let a = nabla_gamma_bar(&f1(&sec));
            let b = f1(&nabla_gamma_bar(&sec));
            report.check(a == b, || ("∇_γ̄ F₁ = F₁ ∇_γ̄".into(), input.clone(), a, b));
        }
    }
    report
}

/// `iH⁻¹ ∇_γ ∇_γ̄ F₂ = F₂ iH⁻¹ ∇_γ̄ ∇_γ` on degree-0 sections with
/// coefficients `u^a v^b`, `a ≤ 2`, `−2 ≤ b ≤ 4`.
pub fn verify_f2_conjugation(kmax: i64) -> Report {
    let mut report = Report::new(format!("F₂ conjugation (K ≤ {kmax})"));
    let i_h_inv = &metric_data().h_inv * &ChartFn::constant(Scalar::i());
    for m in plus_monomials(kmax) {
        for a in 0..=2u32 {
            for b in -2..=4i32 {
                let f = ChartFn::term(Scalar::one(), a, b);
                let sec = FormSection::function(&State::monomial(m.clone()), &f);
                let lhs = nabla_gamma(&nabla_gamma_bar(&f2(&sec))).scale_fn(&i_h_inv);
                let rhs = f2(&nabla_gamma_bar(&nabla_gamma(&sec)).scale_fn(&i_h_inv));
                report.check(lhs == rhs, || ("iH⁻¹∇_γ∇_γ̄F₂ = F₂iH⁻¹∇_γ̄∇_γ".into(), format!("{m} ⊗ [{f}]"), lhs, rhs));
            }
        }
    }
    report
}

/// Fiber operators kill the vacuum, so their action on a fiber state is
/// the bracket with it; the two `∂̄′` implementations agree.
pub fn verify_fiber_conventions(kmax: i64) -> Report {
    let mut report = Report::new(format!("fiber conventions (K ≤ {kmax})"));
    let one = State::vacuum();
    for (name, out) in [("N₁ 1 = 0", n1(&one)), ("(γ̃²)_(−1) 1 = 0", gamma2(&one))] {
        report.check(out.is_zero(), || (name.to_string(), "1".to_string(), out, 0));
    }
    for m in plus_monomials(kmax) {
        for f in probe_coefficients() {
            let sec = FormSection::function(&State::monomial(m.clone()), &f);
            let a = dbar_prime(&sec);
            let b = dbar_prime_by_factors(&sec);
            report.check(a == b, || ("∂̄′ closed form = per-factor rule".into(), format!("{m} ⊗ [{f}]"), a, b));
        }
        let seed = seed_section(&m);
        if let Ok(seed) = seed {
            report.check(dbar_prime(&seed).is_zero(), || ("seed is holomorphic".into(), m.to_string(), dbar_prime(&seed), 0));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        for r in [
            verify_constants(),
            verify_emptiness(3),
            verify_curvature(2),
            verify_recursion(1),
            verify_case3(2, 2),
            verify_f_grading(2),
            verify_f1_commutes(1),
            verify_f2_conjugation(1),
            verify_fiber_conventions(1),
        ] {
            assert!(r.passed(), "{r}");
            assert!(r.checks > 0, "{}", r.name);
        }
    }
}
