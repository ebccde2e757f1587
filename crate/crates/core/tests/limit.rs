mod common;

use proptest::prelude::*;

use common::*;
use thin_oblique::field::Curve;
use thin_oblique::limit::reduce::trace_identity_gap;
use thin_oblique::limit::{assemble_abc, boundary_residual, build_b_c, corrector_expand, LimitCoefficients, LimitOperator};
use thin_oblique::problem::config::ProblemConfig;
use thin_oblique::problem::ProblemInstance;

fn lenient(text: &str) -> ProblemInstance {
    ProblemInstance::from_config(ProblemConfig::parse(text).unwrap(), false).unwrap()
}

const OP: &str = "[operator]\nalpha = 1\nc_f = 3\nfamily.0.sigma = 1, 0; 0, 1\nfamily.0.c = 1\nfamily.0.f = 1 + x\n";

fn oblique(gp: &str, gm: &str, bp: &str, bm: &str) -> ProblemInstance {
    lenient(&format!(
        "[domain]\ng_plus = 1\ng_minus = -1\n[oblique]\ngamma1_plus = {gp}\ngamma1_minus = {gm}\nbeta_plus = {bp}\nbeta_minus = {bm}\n{OP}"
    ))
}

/// Nonzero γ_o, β_o, k±, l± on a non-symmetric domain.
fn general(a: f64, b: f64, k: f64, l: f64) -> ProblemInstance {
    lenient(&format!(
        "[domain]\ng_plus = 1 + x/2\ng_minus = -1 + x*x/4\n\
         [oblique]\ngamma1_plus = {a}*(x + 0.2) + {k}*y\ngamma1_minus = -{a}*(x + 0.2) - 0.5*y*x\n\
         beta_plus = {b}*cos(x) + {l}*y*(1 + x)\nbeta_minus = -{b}*cos(x) + 0.3*y\n\
         [operator]\nalpha = 1\nc_f = 5\n\
         family.p.q.sigma = 1, 0.2; 0.1, 0.9\nfamily.p.q.drift = 0.3, -0.4\nfamily.p.q.c = 1\nfamily.p.q.f = x\n\
         family.p.s.sigma = 0.7, 0; 0.3, 1.1\nfamily.p.s.drift = -0.2, 0.6\nfamily.p.s.c = 2\nfamily.p.s.f = 1 - x\n\
         family.t.q.sigma = 1.3, -0.2; 0, 0.6\nfamily.t.q.c = 1.5\nfamily.t.q.f = 0.5\n\
         family.t.s.sigma = 0.9, 0.4; 0.2, 0.8\nfamily.t.s.drift = 1, 1\nfamily.t.s.c = 1.2\nfamily.t.s.f = sin(x)\n"
    ))
}

fn u0() -> Curve {
    Curve::new(|x| 1.0 + x * x / 2.0 - x.powi(3) / 3.0)
        .with_derivative(|x| x - x * x)
        .with_second_derivative(|x| 1.0 - 2.0 * x)
}

#[test]
fn slopes_extracted_from_fields() {
    let inst = oblique("x + 2*y", "-x", "1", "-1");
    for x in [0.0, 0.3, 1.0] {
        assert!((inst.oblique.k_plus.curve.eval(x) - 2.0).abs() < 1e-12);
        assert!(inst.oblique.l_plus.curve.eval(x).abs() < 1e-12);
        assert!(inst.oblique.l_minus.curve.eval(x).abs() < 1e-12);
    }
    let inst = oblique("sin(y)", "0", "0", "0");
    assert!((inst.oblique.k_plus.curve.eval(0.4) - 1.0).abs() < 1e-8);
}

#[test]
fn zero_data_gives_zero_coefficients() {
    let inst = oblique("0", "0", "0", "0");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    for x in [0.0, 0.5, 1.0] {
        assert_eq!((co.b.eval(x), co.c.eval(x)), (0.0, 0.0));
    }
}

#[test]
fn linear_gamma_gives_b_equal_x() {
    let inst = oblique("0", "0", "0", "0");
    let zero = || Curve::constant(0.0);
    let gamma = Curve::new(|x| x).with_derivative(|_| 1.0);
    let co = build_b_c(&inst.profile, gamma, zero(), [zero(), zero(), zero(), zero()]);
    for x in [0.0, 0.25, 0.8, 1.0] {
        assert!((co.b.eval(x) - x).abs() < 1e-15);
        assert_eq!(co.c.eval(x), 0.0);
    }
}

#[test]
fn decoupled_assembly() {
    let inst = oblique("0", "0", "0.5 + y", "-0.5");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique).at(0.3);
    let (a, b, c) = assemble_abc(&co, 2.0, 1.5);
    assert_eq!(a, [[2.0, 0.0], [0.0, 0.0]]);
    assert_eq!(b, [[0.0, 0.0], [0.0, co.b * 1.5]]);
    assert_eq!(c, [[0.0, 0.0], [0.0, co.c]]);
    assert!((co.c - 0.5).abs() < 1e-12);
    let unit = thin_oblique::limit::CoeffsAt { gamma_o: 1.0, gamma_o_d1: 0.0, beta_o: 0.0, beta_o_d1: 0.0, b: 0.0, c: 0.0 };
    let (a, _, _) = assemble_abc(&unit, 1.0, 0.0);
    let (lo, hi) = eig2(a);
    assert!(lo.abs() < 1e-15 && (hi - 2.0).abs() < 1e-15);
    assert_eq!(assemble_abc(&unit, 0.0, 3.0).0, [[0.0; 2]; 2]);
}

#[test]
fn laplacian_limit_without_correction() {
    let inst = lenient(&format!("[domain]\ng_plus = 1\ng_minus = -1\n{}", OP.replace("1 + x", "0")));
    let g = LimitOperator::from_instance(&inst);
    for (xx, p, r, x) in [(1.0, 2.0, 3.0, 0.5), (-2.0, 0.0, 1.0, 0.0), (0.3, -1.0, -4.0, 1.0)] {
        assert!((g.eval_direct(xx, p, r, x) - (-xx + r)).abs() < 1e-14);
        assert!((g.eval_reduced(xx, p, r, x) - (-xx + r)).abs() < 1e-14);
    }
}

#[test]
fn second_order_coefficient_with_linear_gamma() {
    let inst = oblique("x", "-x", "0", "0");
    let g = LimitOperator::from_instance(&inst);
    let coef = g.eval_direct(0.0, 0.0, 0.0, 0.5) - g.eval_direct(1.0, 0.0, 0.0, 0.5);
    assert!((coef - 1.25).abs() < 1e-12);
    let red = g.reduced_at(0.5);
    assert!((red[0][0].a - 1.25).abs() < 1e-12);
}

#[test]
fn reduction_examples() {
    let inst = oblique("0", "0", "0", "0");
    let red = LimitOperator::from_instance(&inst).reduced_at(0.4);
    assert_eq!((red[0][0].a, red[0][0].b), (1.0, 0.0));
    assert!((red[0][0].f - 1.4).abs() < 1e-15);
    let inst = oblique("1", "-1", "0", "0");
    assert!((LimitOperator::from_instance(&inst).reduced_at(0.4)[0][0].a - 2.0).abs() < 1e-15);
}

#[test]
fn corrector_examples() {
    let inst = oblique("0", "0", "0", "0");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let c = corrector_expand(&inst.profile, &co, Curve::constant(0.0), 0.0);
    for (x, y) in [(0.0, 0.0), (0.5, 0.05), (1.0, -0.1)] {
        assert_eq!((c.v.eval(x), c.w_plus.eval(x), c.w_minus.eval(x), c.psi(0.1, x, y)), (0.0, 0.0, 0.0, 0.0));
    }
    assert_eq!(boundary_residual(&c, &inst.oblique, 0.1, 11).max_abs(), 0.0);

    let inst = oblique("0", "0", "2*y", "0");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let c = corrector_expand(&inst.profile, &co, Curve::constant(0.0), 0.0);
    for x in [0.0, 0.5, 1.0] {
        assert!((c.w_plus.eval(x) - 1.0).abs() < 1e-12 && c.w_minus.eval(x).abs() < 1e-12);
    }

    let inst = oblique("1", "-1", "0", "0");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let half_square = Curve::new(|x| x * x / 2.0).with_derivative(|x| x).with_second_derivative(|_| 1.0);
    let c = corrector_expand(&inst.profile, &co, half_square, 0.0);
    for x in [0.0, 0.3, 1.0] {
        assert!((c.v.eval(x) + x).abs() < 1e-12);
    }
}

#[test]
fn strict_residual_tends_to_delta_width() {
    let inst = oblique("0", "0", "0", "0");
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let c = corrector_expand(&inst.profile, &co, Curve::constant(0.0), 1.0);
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.05, 0.025, 0.0125] {
        let r = boundary_residual(&c, &inst.oblique, eps, 51);
        let dev = r.top.iter().fold(0.0f64, |m, v| m.max((v / eps - 1.0).abs()));
        assert!(dev <= prev);
        prev = dev;
    }
    assert!(prev < 1e-12);
}

#[test]
fn unstrict_residual_is_little_o() {
    let inst = general(0.5, 0.3, 0.7, 0.4);
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let c = corrector_expand(&inst.profile, &co, u0(), 0.0);
    let r = |eps: f64| boundary_residual(&c, &inst.oblique, eps, 101).max_abs() / eps;
    let (a, b, d) = (r(0.1), r(0.05), r(0.025));
    assert!(b < a && d < b, "{a} {b} {d}");
    assert!(d <= 0.5 * a, "{a} {d}");
}

#[test]
fn w_sum_identity() {
    let inst = general(0.5, 0.3, 0.7, 0.4);
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let u = u0();
    let c = corrector_expand(&inst.profile, &co, u.clone(), 0.0);
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let lhs = c.w_plus.eval(x) + c.w_minus.eval(x);
        let rhs = co.gamma_o.eval(x).powi(2) * u.d2(x) + co.b.eval(x) * u.d1(x) + co.c.eval(x);
        assert!((lhs - rhs).abs() < 1e-6, "x={x}: {lhs} vs {rhs}");
    }
}

#[test]
fn v_derivative_identity() {
    let inst = general(0.5, 0.3, 0.7, 0.4);
    let co = LimitCoefficients::from_data(&inst.profile, &inst.oblique);
    let u = u0();
    let c = corrector_expand(&inst.profile, &co, u.clone(), 0.0);
    for i in 1..20 {
        let x = i as f64 / 20.0;
        let h = 1e-5;
        let fd = (c.v.eval(x + h) - c.v.eval(x - h)) / (2.0 * h);
        let oracle = -0.3 * x.sin() - u.d1(x) * 0.5 - 0.5 * (x + 0.2) * u.d2(x);
        assert!((fd - oracle).abs() < 1e-6, "x={x}: {fd} vs {oracle}");
        assert!((c.v.d1(x) - oracle).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dual_path_and_trace_identity(
        a in 0.1f64..1.0, b in 0.1f64..1.0, k in 0.1f64..1.0, l in 0.1f64..1.0,
        samples in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, 0.0f64..=1.0), 64)
    ) {
        let g = LimitOperator::from_instance(&general(a, b, k, l));
        for (xx, p, r, x) in samples {
            let d = g.eval_direct(xx, p, r, x);
            let e = g.eval_reduced(xx, p, r, x);
            prop_assert!((d - e).abs() <= 1e-10 * (1.0 + d.abs()));
            prop_assert!(trace_identity_gap(&g, x) <= 1e-12);
        }
    }
}
