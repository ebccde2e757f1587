//! The limit operator `G(X,p,r,x) = F(A+B+C, (p, β_o − γ_o p), r, (x,0))`
//! and its reduced one-dimensional Bellman-Isaacs form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{fmt_x, CheckReport};
use crate::limit::coeffs::{assemble_abc, CoeffsAt, LimitCoefficients};
use crate::operators::{self, add, eval_frozen, inf_sup, min_eig, BellmanIsaacsOperator, FamilyAt};
use crate::problem::ProblemInstance;

/// One reduced family at a point: `σ̃ = σ(x,0)(1, −γ_o)ᵀ`, `ã = |σ̃|²`,
/// drift `b̃`, zeroth-order `c`, source `f̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFamily {
    pub sigma: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
}

impl ReducedFamily {
    #[inline]
    pub fn apply(&self, x: f64, p: f64, r: f64) -> f64 {
        -self.a * x - self.b * p + self.c * r - self.f
    }
}

/// Reduces every family of `base` at `x`.
pub fn reduce_bi(base: &BellmanIsaacsOperator, co: &CoeffsAt, x: f64) -> Vec<Vec<ReducedFamily>> {
    base.families
        .iter()
        .map(|row| row.iter().map(|fam| reduce_family(&fam.sigma_at(x, 0.0), &fam.at(x, 0.0), co)).collect())
        .collect()
}

fn reduce_family(sigma: &[[f64; 2]], at: &FamilyAt, co: &CoeffsAt) -> ReducedFamily {
    let g = co.gamma_o;
    let st: Vec<f64> = sigma.iter().map(|r| r[0] - r[1] * g).collect();
    let a = st.iter().map(|v| v * v).sum();
    let s = &at.a;
    // tr(S B(1)) + b₁ − b₂γ_o and f + tr(S C) + b₂β_o
    let b = -2.0 * s[0][1] * co.gamma_o_d1 + s[1][1] * co.b + at.b[0] - at.b[1] * g;
    let f = at.f + 2.0 * s[0][1] * co.beta_o_d1 + s[1][1] * co.c + at.b[1] * co.beta_o;
    ReducedFamily { sigma: st, a, b, c: at.c, f }
}

#[derive(Debug, Clone)]
pub struct LimitOperator {
    pub coeffs: LimitCoefficients,
    pub base: BellmanIsaacsOperator,
}

impl LimitOperator {
    pub fn new(coeffs: LimitCoefficients, base: BellmanIsaacsOperator) -> LimitOperator {
        LimitOperator { coeffs, base }
    }

    pub fn from_instance(inst: &ProblemInstance) -> LimitOperator {
        LimitOperator::new(LimitCoefficients::from_data(&inst.profile, &inst.oblique), inst.operator.clone())
    }

    /// `G` evaluated through `F` at the assembled matrix.
    pub fn eval_direct(&self, xx: f64, p: f64, r: f64, x: f64) -> f64 {
        let co = self.coeffs.at(x);
        let (a, b, c) = assemble_abc(&co, xx, p);
        let m = add(&add(&a, &b), &c);
        let q = [p, co.beta_o - co.gamma_o * p];
        eval_frozen(&self.base.coefficients_at(x, 0.0), &m, &q, r)
    }

    pub fn reduced_at(&self, x: f64) -> Vec<Vec<ReducedFamily>> {
        reduce_bi(&self.base, &self.coeffs.at(x), x)
    }

    /// `G` evaluated through the reduced families.
    pub fn eval_reduced(&self, xx: f64, p: f64, r: f64, x: f64) -> f64 {
        let red = self.reduced_at(x);
        inf_sup(red.len(), red[0].len(), |l, m| red[l][m].apply(xx, p, r)).0
    }
}

fn random_x(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..=1.0)
}

/// Direct and reduced evaluations agree within `1e−10 (1 + |G|)`.
pub fn check_dual_path(limop: &LimitOperator, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::NEG_INFINITY, String::new());
    for _ in 0..samples {
        let (xx, p, r, x) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), random_x(&mut rng));
        let d = limop.eval_direct(xx, p, r, x);
        let e = limop.eval_reduced(xx, p, r, x);
        let rel = (d - e).abs() / (1.0 + d.abs());
        if rel > worst.0 {
            worst = (rel, format!("X={:.4}, p={:.4}, r={:.4}, {}", xx, p, r, fmt_x(x)));
        }
    }
    CheckReport::new("dual_path", "|G direct - G reduced| <= 1e-10 (1 + |G|)", worst.0 <= 1e-10, worst.0, worst.1)
}

/// (a) `A(X)` is PSD for `X ≥ 0`, with the factorization
/// `A(X) = (1, −γ_o)ᵀ X (1, −γ_o)` checked entrywise; (b) `G` is
/// nonincreasing in `X`.
pub fn check_degenerate_ellipticity(limop: &LimitOperator, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, String::new());
    for _ in 0..samples {
        let x = random_x(&mut rng);
        let co = limop.coeffs.at(x);
        let xx = rng.gen_range(0.0..5.0);
        let (a, _, _) = assemble_abc(&co, xx, 0.0);
        let g = co.gamma_o;
        let fac = [[xx, -g * xx], [-g * xx, g * g * xx]];
        let fac_err = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - fac[i][j]).abs()).fold(0.0, f64::max);
        let eig = min_eig(&a) + 1e-12 - fac_err;
        if eig < worst.0 {
            worst = (eig, format!("A PSD, X={:.4}, {}", xx, fmt_x(x)));
        }
        let (p, r) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let lo = rng.gen_range(-5.0..5.0);
        let hi = lo + rng.gen_range(0.0..5.0);
        let m = limop.eval_direct(lo, p, r, x) - limop.eval_direct(hi, p, r, x) + 1e-12;
        if m < worst.0 {
            worst = (m, format!("G monotone, X={:.4} <= Y={:.4}, {}", lo, hi, fmt_x(x)));
        }
    }
    CheckReport::new(
        "degenerate_ellipticity",
        "A(X) >= 0 for X >= 0 and G(X) >= G(Y) for X <= Y",
        worst.0 >= 0.0,
        worst.0,
        worst.1,
    )
}

/// Sampled continuity bound for `G` inherited from the Lipschitz bound on `F`.
pub fn check_limit_continuity(limop: &LimitOperator, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cf = limop.base.c_f;
    let mut worst = (f64::INFINITY, String::new());
    for _ in 0..samples {
        let x = random_x(&mut rng);
        let co = limop.coeffs.at(x);
        let (xa, xb) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (pa, pb) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let r = rng.gen_range(-3.0..3.0);
        let lhs = (limop.eval_direct(xa, pa, r, x) - limop.eval_direct(xb, pb, r, x)).abs();
        let g2 = co.gamma_o * co.gamma_o;
        let dp = (pa - pb).abs();
        let rhs = cf * cf * ((1.0 + g2) * (xa - xb).abs() + (2.0 * co.gamma_o_d1.powi(2) + co.b * co.b).sqrt() * dp)
            + cf * (1.0 + g2).sqrt() * dp;
        let m = rhs - lhs + 1e-12 * (1.0 + rhs);
        if m < worst.0 {
            worst = (m, fmt_x(x));
        }
    }
    CheckReport::new(
        "limit_continuity",
        "|G(X,p) - G(Y,q)| <= C_F^2 ((1+gamma_o^2)|X-Y| + |B(1)||p-q|) + C_F sqrt(1+gamma_o^2)|p-q|",
        worst.0 >= 0.0,
        worst.0,
        worst.1,
    )
}

/// `tr(σ̃ᵀσ̃)(x)` against `tr[(σᵀσ)(x,0) A(1,x)]` for every family.
pub fn trace_identity_gap(limop: &LimitOperator, x: f64) -> f64 {
    let co = limop.coeffs.at(x);
    let (a1, _, _) = assemble_abc(&co, 1.0, 0.0);
    let red = limop.reduced_at(x);
    let mut gap: f64 = 0.0;
    for (l, m, fam) in limop.base.iter_families() {
        let s = fam.at(x, 0.0).a;
        gap = gap.max((operators::trace_prod(&s, &a1) - red[l][m].a).abs());
    }
    gap
}
