//! Expansion slopes `k±, l±`, the limit coefficients `b, c`, and the
//! matrices `A, B, C` entering the limit operator.

use crate::check::linspace;
use crate::field::{Curve, ScalarField};
use crate::operators::Mat2;
use crate::problem::{DomainProfile, ObliqueData};

const RICHARDSON_H: f64 = 1e-2;

fn central(f: &ScalarField, x: f64, h: f64) -> f64 {
    (f.eval(x, h) - f.eval(x, -h)) / (2.0 * h)
}

/// Slope in y at `y = 0` by centered differences with steps `1e-2`, `5e-3`
/// and one Richardson step. Returns the curve, the largest extrapolation
/// residual on a 101-point sample, and where it occurred.
pub fn extract_slope(f: &ScalarField) -> (Curve, f64, f64) {
    if let Some(dy) = &f.dy {
        let d = dy.with_y(0.0);
        let curve = Curve::new(move |x| d.eval(x, 0.0));
        return (curve, 0.0, 0.0);
    }
    let extrapolate = |f: &ScalarField, x: f64| {
        let d1 = central(f, x, RICHARDSON_H);
        let d2 = central(f, x, RICHARDSON_H / 2.0);
        ((4.0 * d2 - d1) / 3.0, d2)
    };
    let mut worst = (0.0, 0.0);
    for x in linspace(0.0, 1.0, 101) {
        let (r, d2) = extrapolate(f, x);
        let res = (r - d2).abs();
        if !(res <= worst.0) {
            worst = (res, x);
        }
    }
    let g = f.clone();
    (Curve::new(move |x| extrapolate(&g, x).0), worst.0, worst.1)
}

/// `γ_o, β_o, k±, l±` together with `b = γ_oγ_o′ − (g⁺k⁺ + g⁻k⁻)/(g⁺−g⁻)`
/// and `c = −γ_oβ_o′ + (g⁺l⁺ + g⁻l⁻)/(g⁺−g⁻)`.
#[derive(Debug, Clone)]
pub struct LimitCoefficients {
    pub gamma_o: Curve,
    pub beta_o: Curve,
    pub b: Curve,
    pub c: Curve,
    pub k_plus: Curve,
    pub k_minus: Curve,
    pub l_plus: Curve,
    pub l_minus: Curve,
    pub g_plus: Curve,
    pub g_minus: Curve,
}

impl LimitCoefficients {
    pub fn from_data(profile: &DomainProfile, data: &ObliqueData) -> LimitCoefficients {
        build_b_c(
            profile,
            data.gamma_o.clone(),
            data.beta_o.clone(),
            [data.k_plus.curve.clone(), data.k_minus.curve.clone(), data.l_plus.curve.clone(), data.l_minus.curve.clone()],
        )
    }
}

pub fn build_b_c(profile: &DomainProfile, gamma_o: Curve, beta_o: Curve, slopes: [Curve; 4]) -> LimitCoefficients {
    let [k_plus, k_minus, l_plus, l_minus] = slopes;
    let gp = profile.g_plus.curve();
    let gm = profile.g_minus.curve();
    let b = {
        let (go, kp, km, gp, gm) = (gamma_o.clone(), k_plus.clone(), k_minus.clone(), gp.clone(), gm.clone());
        Curve::new(move |x| {
            let (p, m) = (gp.eval(x), gm.eval(x));
            go.eval(x) * go.d1(x) - (p * kp.eval(x) + m * km.eval(x)) / (p - m)
        })
    };
    let c = {
        let (go, bo, lp, lm, gp, gm) = (gamma_o.clone(), beta_o.clone(), l_plus.clone(), l_minus.clone(), gp.clone(), gm.clone());
        Curve::new(move |x| {
            let (p, m) = (gp.eval(x), gm.eval(x));
            -go.eval(x) * bo.d1(x) + (p * lp.eval(x) + m * lm.eval(x)) / (p - m)
        })
    };
    LimitCoefficients { gamma_o, beta_o, b, c, k_plus, k_minus, l_plus, l_minus, g_plus: gp, g_minus: gm }
}

/// Limit coefficients frozen at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffsAt {
    pub gamma_o: f64,
    pub gamma_o_d1: f64,
    pub beta_o: f64,
    pub beta_o_d1: f64,
    pub b: f64,
    pub c: f64,
}

impl LimitCoefficients {
    pub fn at(&self, x: f64) -> CoeffsAt {
        CoeffsAt {
            gamma_o: self.gamma_o.eval(x),
            gamma_o_d1: self.gamma_o.d1(x),
            beta_o: self.beta_o.eval(x),
            beta_o_d1: self.beta_o.d1(x),
            b: self.b.eval(x),
            c: self.c.eval(x),
        }
    }
}

/// `A = [[X, −Xγ_o], [−γ_oX, γ_o²X]]`, `B = [[0, −pγ_o′], [−pγ_o′, b p]]`,
/// `C = [[0, β_o′], [β_o′, c]]`.
pub fn assemble_abc(co: &CoeffsAt, x: f64, p: f64) -> (Mat2, Mat2, Mat2) {
    let g = co.gamma_o;
    let a = [[x, -x * g], [-g * x, g * x * g]];
    let b = [[0.0, -p * co.gamma_o_d1], [-p * co.gamma_o_d1, co.b * p]];
    let c = [[0.0, co.beta_o_d1], [co.beta_o_d1, co.c]];
    (a, b, c)
}
