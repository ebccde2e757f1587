//! Thin-domain geometry: outward normals on the top/bottom boundaries,
//! top/bottom obliqueness, and the fitted `(x, t)` grid.

use serde::Serialize;

use crate::check::{fmt_x, linspace, CheckReport};
use crate::problem::{DomainProfile, ObliqueData, LINE_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

/// Unit outward normal `(−εg⁺′, 1)/‖·‖` on the top, `(εg⁻′, −1)/‖·‖` on the bottom.
pub fn outward_normal_tb(profile: &DomainProfile, eps: f64, x: f64, side: Side) -> [f64; 2] {
    let v = match side {
        Side::Top => [-eps * profile.g_plus.ddx(x, 0.0), 1.0],
        Side::Bottom => [eps * profile.g_minus.ddx(x, 0.0), -1.0],
    };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

#[derive(Debug, Clone, Serialize)]
pub struct ObliquenessReport {
    pub eps: f64,
    /// `min (−εg⁺′γ₁⁺ + 1)` over the top boundary
    pub min_top: f64,
    pub min_top_at: f64,
    /// `min (εg⁻′γ₁⁻ + 1)` over the bottom boundary
    pub min_bottom: f64,
    pub min_bottom_at: f64,
    /// `ε max|g±| ≤ 1`, so that the boundary data are evaluated inside their domain
    pub contained: bool,
    pub pass: bool,
}

impl ObliquenessReport {
    pub fn to_check(&self, threshold: f64) -> CheckReport {
        let (v, x) = if self.min_top <= self.min_bottom {
            (self.min_top, self.min_top_at)
        } else {
            (self.min_bottom, self.min_bottom_at)
        };
        let mut r = CheckReport::new(
            "obliqueness_tb",
            &format!("-eps g_plus' gamma1_plus + 1 > 0 and eps g_minus' gamma1_minus + 1 > 0 at eps={}", self.eps),
            self.pass,
            v,
            fmt_x(x),
        )
        .with_detail(format!("threshold eps*={:.6}", threshold));
        if !self.contained {
            r.what = format!("eps max|g| <= 1 at eps={}", self.eps);
        }
        r
    }
}

pub fn check_obliqueness_tb(profile: &DomainProfile, data: &ObliqueData, eps: f64) -> ObliquenessReport {
    let mut rep = ObliquenessReport {
        eps,
        min_top: f64::INFINITY,
        min_top_at: 0.0,
        min_bottom: f64::INFINITY,
        min_bottom_at: 0.0,
        contained: eps * profile.max_abs_g() <= 1.0,
        pass: false,
    };
    for x in linspace(0.0, 1.0, LINE_SAMPLES) {
        let gp = profile.g_plus.eval(x, 0.0);
        let gm = profile.g_minus.eval(x, 0.0);
        let top = -eps * profile.g_plus.ddx(x, 0.0) * data.gamma1_plus.eval(x, eps * gp) + 1.0;
        let bot = eps * profile.g_minus.ddx(x, 0.0) * data.gamma1_minus.eval(x, eps * gm) + 1.0;
        if top < rep.min_top {
            rep.min_top = top;
            rep.min_top_at = x;
        }
        if bot < rep.min_bottom {
            rep.min_bottom = bot;
            rep.min_bottom_at = x;
        }
    }
    rep.pass = rep.contained && rep.min_top > 0.0 && rep.min_bottom > 0.0;
    rep
}

/// Supremum of the ε for which every smaller sampled ε passes
/// [`check_obliqueness_tb`].
pub fn obliqueness_threshold(profile: &DomainProfile, data: &ObliqueData) -> f64 {
    let eps_max = 1.0 / profile.max_abs_g().max(1e-300);
    let steps = 200;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let e = eps_max * k as f64 / steps as f64;
        if check_obliqueness_tb(profile, data, e).pass {
            lo = e;
        } else {
            hi = Some(e);
            break;
        }
    }
    let Some(mut hi) = hi else { return eps_max };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if check_obliqueness_tb(profile, data, mid).pass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Metric terms of `t = (y/ε − g⁻(x)) / (g⁺(x) − g⁻(x))` at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub tx: f64,
    pub ty: f64,
    pub txx: f64,
    pub txy: f64,
}

/// Fitted grid on `Ω̄_ε`: `x_i = i/(nx−1)`, `t_j = j/(nt−1)`,
/// `y_ij = ε(g⁻(x_i) + t_j (g⁺(x_i) − g⁻(x_i)))`, ordered with `t` fastest.
#[derive(Debug, Clone)]
pub struct ThinGrid {
    pub eps: f64,
    pub nx: usize,
    pub nt: usize,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub gm: Vec<f64>,
    pub gp: Vec<f64>,
    gm_d1: Vec<f64>,
    gm_d2: Vec<f64>,
    width: Vec<f64>,
    width_d1: Vec<f64>,
    width_d2: Vec<f64>,
}

impl ThinGrid {
    pub fn new(profile: &DomainProfile, eps: f64, nx: usize, nt: usize) -> ThinGrid {
        let xs = linspace(0.0, 1.0, nx);
        let ts = linspace(0.0, 1.0, nt);
        let gmc = profile.g_minus.curve();
        let gpc = profile.g_plus.curve();
        let gm: Vec<f64> = xs.iter().map(|&x| gmc.eval(x)).collect();
        let gp: Vec<f64> = xs.iter().map(|&x| gpc.eval(x)).collect();
        let gm_d1: Vec<f64> = xs.iter().map(|&x| gmc.d1(x)).collect();
        let gm_d2: Vec<f64> = xs.iter().map(|&x| gmc.d2(x)).collect();
        let width = gm.iter().zip(&gp).map(|(a, b)| b - a).collect();
        let width_d1 = xs.iter().zip(&gm_d1).map(|(&x, d)| gpc.d1(x) - d).collect();
        let width_d2 = xs.iter().zip(&gm_d2).map(|(&x, d)| gpc.d2(x) - d).collect();
        ThinGrid { eps, nx, nt, xs, ts, gm, gp, gm_d1, gm_d2, width, width_d1, width_d2 }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        1.0 / (self.nt - 1) as f64
    }

    #[inline]
    pub fn y(&self, i: usize, j: usize) -> f64 {
        self.eps * (self.gm[i] + self.ts[j] * self.width[i])
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.nt, k % self.nt);
        (self.xs[i], self.y(i, j))
    }

    pub fn metric(&self, i: usize, j: usize) -> Metric {
        let t = self.ts[j];
        let (h, h1, h2) = (self.width[i], self.width_d1[i], self.width_d2[i]);
        let tx = -(self.gm_d1[i] + t * h1) / h;
        Metric {
            tx,
            ty: 1.0 / (self.eps * h),
            txx: -(self.gm_d2[i] + t * h2 + 2.0 * tx * h1) / h,
            txy: -h1 / (self.eps * h * h),
        }
    }

    /// `(∂y/∂x, ∂y/∂t)` of the map at a node.
    pub fn jacobian(&self, i: usize, j: usize) -> (f64, f64) {
        (self.eps * (self.gm_d1[i] + self.ts[j] * self.width_d1[i]), self.eps * self.width[i])
    }

    /// Ratio of the t- and x-direction second-order scales, `(hx / (ε H ht))²`.
    pub fn anisotropy(&self) -> f64 {
        let hmin = self.width.iter().cloned().fold(f64::INFINITY, f64::min);
        (self.hx() / (self.eps * hmin * self.ht())).powi(2)
    }
}
