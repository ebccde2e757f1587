//! Correctors of the formal expansion `u ≈ u⁰ + εu¹ + ε²u²` and the test
//! function `Ψ_ε` with its oblique boundary residual.

use serde::Serialize;

use crate::check::linspace;
use crate::fdsolver::GridFunction;
use crate::field::Curve;
use crate::limit::coeffs::LimitCoefficients;
use crate::problem::{DomainProfile, ObliqueData};

#[derive(Debug, Clone)]
pub struct Corrector {
    pub u0: Curve,
    pub delta: f64,
    /// `v = β_o − γ_o u0′`
    pub v: Curve,
    /// `w± = g±/(g⁺−g⁻) (l± − k± u0′ ∓ γ_o v′)`
    pub w_plus: Curve,
    pub w_minus: Curve,
    g_plus: Curve,
    g_minus: Curve,
    h: Curve,
}

pub fn corrector_expand(profile: &DomainProfile, coeffs: &LimitCoefficients, u0: Curve, delta: f64) -> Corrector {
    let v = {
        let (bo, go, u) = (coeffs.beta_o.clone(), coeffs.gamma_o.clone(), u0.clone());
        let (bo1, go1, u1) = (bo.clone(), go.clone(), u.clone());
        Curve::new(move |x| bo.eval(x) - go.eval(x) * u.d1(x))
            .with_derivative(move |x| bo1.d1(x) - go1.d1(x) * u1.d1(x) - go1.eval(x) * u1.d2(x))
    };
    let gp = profile.g_plus.curve();
    let gm = profile.g_minus.curve();
    let w = |sign: f64, k: &Curve, l: &Curve, g: &Curve| {
        let (k, l, g, gp, gm, go, u, v) =
            (k.clone(), l.clone(), g.clone(), gp.clone(), gm.clone(), coeffs.gamma_o.clone(), u0.clone(), v.clone());
        Curve::new(move |x| {
            g.eval(x) / (gp.eval(x) - gm.eval(x)) * (l.eval(x) - k.eval(x) * u.d1(x) - sign * go.eval(x) * v.d1(x))
        })
    };
    Corrector {
        w_plus: w(1.0, &coeffs.k_plus, &coeffs.l_plus, &gp),
        w_minus: w(-1.0, &coeffs.k_minus, &coeffs.l_minus, &gm),
        u0,
        delta,
        v,
        g_plus: gp,
        g_minus: gm,
        h: profile.h.curve(),
    }
}

/// As [`corrector_expand`] with `u0` a discrete limit solution, interpolated
/// by a natural cubic spline.
pub fn corrector_from_grid(profile: &DomainProfile, coeffs: &LimitCoefficients, u0: &GridFunction, delta: f64) -> Corrector {
    let xs: Vec<f64> = u0.points.iter().map(|p| p.0).collect();
    corrector_expand(profile, coeffs, Curve::spline(&xs, &u0.values), delta)
}

impl Corrector {
    /// `u²(x, Y) = ½(Y−g⁻)²w⁺ + ½(Y−g⁺)²w⁻` in the stretched variable `Y = y/ε`.
    pub fn u2(&self, x: f64, yy: f64) -> f64 {
        0.5 * (yy - self.g_minus.eval(x)).powi(2) * self.w_plus.eval(x)
            + 0.5 * (yy - self.g_plus.eval(x)).powi(2) * self.w_minus.eval(x)
    }

    /// `Ψ_ε = u0 + v y + ½{(y−εg⁻)²w⁺ + (y−εg⁺)²w⁻ + δ(y−εh)²}`.
    pub fn psi(&self, eps: f64, x: f64, y: f64) -> f64 {
        let (gm, gp, h) = (self.g_minus.eval(x), self.g_plus.eval(x), self.h.eval(x));
        self.u0.eval(x)
            + self.v.eval(x) * y
            + 0.5
                * ((y - eps * gm).powi(2) * self.w_plus.eval(x)
                    + (y - eps * gp).powi(2) * self.w_minus.eval(x)
                    + self.delta * (y - eps * h).powi(2))
    }

    /// `(D_xΨ_ε, D_yΨ_ε)`.
    pub fn grad_psi(&self, eps: f64, x: f64, y: f64) -> [f64; 2] {
        let (gm, gp, h) = (self.g_minus.eval(x), self.g_plus.eval(x), self.h.eval(x));
        let (wp, wm) = (self.w_plus.eval(x), self.w_minus.eval(x));
        let (dm, dp, dh) = (y - eps * gm, y - eps * gp, y - eps * h);
        let dx = self.u0.d1(x)
            + y * self.v.d1(x)
            + 0.5 * (dm * dm * self.w_plus.d1(x) + dp * dp * self.w_minus.d1(x))
            - eps * (dm * wp * self.g_minus.d1(x) + dp * wm * self.g_plus.d1(x) + self.delta * dh * self.h.d1(x));
        let dy = self.v.eval(x) + dm * wp + dp * wm + self.delta * dh;
        [dx, dy]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryResidual {
    pub eps: f64,
    pub xs: Vec<f64>,
    /// `γ₁⁺D_xΨ + D_yΨ − β⁺` at `y = εg⁺`
    pub top: Vec<f64>,
    /// `γ₁⁻D_xΨ − D_yΨ − β⁻` at `y = εg⁻`
    pub bottom: Vec<f64>,
}

impl BoundaryResidual {
    pub fn max_abs(&self) -> f64 {
        self.top.iter().chain(&self.bottom).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_top(&self) -> f64 {
        self.top.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn boundary_residual(corr: &Corrector, data: &ObliqueData, eps: f64, n: usize) -> BoundaryResidual {
    let xs = linspace(0.0, 1.0, n);
    let mut top = Vec::with_capacity(n);
    let mut bottom = Vec::with_capacity(n);
    for &x in &xs {
        let y = eps * corr.g_plus.eval(x);
        let g = corr.grad_psi(eps, x, y);
        top.push(data.gamma1_plus.eval(x, y) * g[0] + g[1] - data.beta_plus.eval(x, y));
        let y = eps * corr.g_minus.eval(x);
        let g = corr.grad_psi(eps, x, y);
        bottom.push(data.gamma1_minus.eval(x, y) * g[0] - g[1] - data.beta_minus.eval(x, y));
    }
    BoundaryResidual { eps, xs, top, bottom }
}
