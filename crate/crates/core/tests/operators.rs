mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::*;
use thin_oblique::operators::{check_lipschitz, check_properness, eval_frozen, BellmanIsaacsOperator, Mat2, OperatorPoint};

fn sym() -> impl Strategy<Value = Mat2> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b, c)| [[a, b], [b, c]])
}

fn psd() -> impl Strategy<Value = Mat2> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b, c)| [[a * a, a * b], [a * b, b * b + c * c]])
}

fn z() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..=1.0, -1.0f64..=1.0)
}

fn ops() -> &'static [BellmanIsaacsOperator] {
    static OPS: OnceLock<Vec<BellmanIsaacsOperator>> = OnceLock::new();
    OPS.get_or_init(|| VALID.iter().map(|n| load(n).operator).collect())
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn frob(a: &Mat2) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn single_family_matches_hand_evaluation() {
    let inst = instance(
        "[domain]\ng_plus = 1\ng_minus = -1\n[operator]\nalpha = 1\nc_f = 3\n\
         family.0.sigma = 1.2, 0.3; 0, 0.8\nfamily.0.drift = 0.5, -0.2\nfamily.0.c = 1 + x\nfamily.0.f = y\n",
    );
    let (s1, s2) = ([1.2, 0.3], [0.0, 0.8]);
    let a = |i: usize, j: usize| s1[i] * s1[j] + s2[i] * s2[j];
    for (x, p, r, zz) in [
        ([[1.0, 0.5], [0.5, -2.0]], [0.3, -1.0], 0.7, (0.2, 0.4)),
        ([[0.0, 0.0], [0.0, 0.0]], [0.0, 0.0], 1.0, (1.0, -0.5)),
        ([[-3.0, 1.0], [1.0, 2.0]], [2.0, 2.0], -1.5, (0.0, 0.0)),
    ] {
        let oracle = -(a(0, 0) * x[0][0] + 2.0 * a(0, 1) * x[0][1] + a(1, 1) * x[1][1]) - 0.5 * p[0] + 0.2 * p[1]
            + (1.0 + zz.0) * r
            - zz.1;
        let got = inst.operator.eval(&OperatorPoint::new(x, p, r, zz));
        assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");
    }
}

#[test]
fn inf_over_two_traces() {
    let inst = instance(
        "[domain]\ng_plus = 1\ng_minus = -1\n[operator]\nalpha = 1\nc_f = 3\n\
         family.one.sigma = 1, 0; 0, 1\nfamily.one.c = 1\nfamily.one.f = 0\n\
         family.two.sigma = 1.4142135623730951, 0; 0, 1.4142135623730951\nfamily.two.c = 1\nfamily.two.f = 0\n",
    );
    let v = inst.operator.eval(&OperatorPoint::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0, (0.5, 0.0)));
    assert!((v + 4.0).abs() < 1e-12);
}

#[test]
fn shipped_operators_pass_sampled_checks() {
    for op in ops() {
        assert!(check_properness(op, 1000, 42).pass);
        assert!(check_lipschitz(op, 1000, 42).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn monotone_in_hessian(y in sym(), d in psd(), p in (-3.0f64..3.0, -3.0f64..3.0), r in -3.0f64..3.0, z in z()) {
        let x = add(&y, &d);
        for op in ops() {
            let co = op.coefficients_at(z.0, z.1);
            let fx = eval_frozen(&co, &x, &[p.0, p.1], r);
            let fy = eval_frozen(&co, &y, &[p.0, p.1], r);
            prop_assert!(fx <= fy + 1e-12 * (1.0 + fx.abs()));
        }
    }

    #[test]
    fn proper_with_declared_alpha(x in sym(), p in (-3.0f64..3.0, -3.0f64..3.0), r in -3.0f64..3.0, t in 0.0f64..3.0, z in z()) {
        for op in ops() {
            let co = op.coefficients_at(z.0, z.1);
            let gain = eval_frozen(&co, &x, &[p.0, p.1], r + t) - eval_frozen(&co, &x, &[p.0, p.1], r);
            prop_assert!(gain >= op.alpha * t - 1e-12 * (1.0 + t));
        }
    }

    #[test]
    fn identical_arguments_have_zero_margin(x in sym(), p in (-3.0f64..3.0, -3.0f64..3.0), r in -3.0f64..3.0, z in z()) {
        for op in ops() {
            prop_assert_eq!(op.properness_margin(&x, &x, &[p.0, p.1], r, r, z), 0.0);
        }
    }

    #[test]
    fn lipschitz_in_hessian_and_gradient(
        x in sym(), y in sym(), p in (-3.0f64..3.0, -3.0f64..3.0), q in (-3.0f64..3.0, -3.0f64..3.0), r in -3.0f64..3.0, z in z()
    ) {
        for op in ops() {
            let co = op.coefficients_at(z.0, z.1);
            let lhs = (eval_frozen(&co, &x, &[p.0, p.1], r) - eval_frozen(&co, &y, &[q.0, q.1], r)).abs();
            let dx = [[x[0][0] - y[0][0], x[0][1] - y[0][1]], [x[1][0] - y[1][0], x[1][1] - y[1][1]]];
            let rhs = op.c_f * op.c_f * frob(&dx) + op.c_f * (p.0 - q.0).hypot(p.1 - q.1);
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn singleton_sets_reduce_to_the_family(x in sym(), p in (-3.0f64..3.0, -3.0f64..3.0), r in -3.0f64..3.0, z in z()) {
        let op = &ops()[0];
        prop_assert_eq!((op.n_lambda(), op.n_mu()), (1, 1));
        let fam = op.families[0][0].at(z.0, z.1);
        prop_assert_eq!(op.eval(&OperatorPoint::new(x, [p.0, p.1], r, z)), fam.apply(&x, &[p.0, p.1], r));
    }
}
