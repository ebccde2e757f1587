//! Bellman-Isaacs operators
//! `F(X,p,r,z) = inf_λ sup_μ { -tr(σᵀσ X) - b·p + c r - f }`
//! over finite index sets, and the sampled structural checks on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{fmt_x, fmt_xy, linspace, CheckReport};
use crate::field::{Curve, ScalarField};

pub type Mat2 = [[f64; 2]; 2];

pub fn trace_prod(a: &Mat2, x: &Mat2) -> f64 {
    a[0][0] * x[0][0] + a[0][1] * x[1][0] + a[1][0] * x[0][1] + a[1][1] * x[1][1]
}

pub fn frob(a: &Mat2) -> f64 {
    (a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2)).sqrt()
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// Smallest eigenvalue of a symmetric 2×2 matrix.
pub fn min_eig(a: &Mat2) -> f64 {
    let m = 0.5 * (a[0][0] + a[1][1]);
    let d = 0.5 * (a[0][0] - a[1][1]);
    m - (d * d + a[0][1] * a[0][1]).sqrt()
}

/// Arguments `(X, p, r, z)` of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorPoint {
    pub hess: Mat2,
    pub p: [f64; 2],
    pub r: f64,
    pub z: (f64, f64),
}

impl OperatorPoint {
    pub fn new(hess: Mat2, p: [f64; 2], r: f64, z: (f64, f64)) -> OperatorPoint {
        debug_assert!((hess[0][1] - hess[1][0]).abs() <= 1e-12 * (1.0 + frob(&hess)), "X must be symmetric");
        OperatorPoint { hess, p, r, z }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    /// rows of σ, each a pair of fields
    pub sigma: Vec<[ScalarField; 2]>,
    pub drift: [ScalarField; 2],
    pub c: ScalarField,
    pub f: ScalarField,
}

/// Coefficients of one family frozen at a point, with `a = σᵀσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyAt {
    pub a: Mat2,
    pub b: [f64; 2],
    pub c: f64,
    pub f: f64,
}

impl FamilyAt {
    #[inline]
    pub fn apply(&self, x: &Mat2, p: &[f64; 2], r: f64) -> f64 {
        -trace_prod(&self.a, x) - self.b[0] * p[0] - self.b[1] * p[1] + self.c * r - self.f
    }
}

impl CoefficientFamily {
    pub fn sigma_at(&self, x: f64, y: f64) -> Vec<[f64; 2]> {
        self.sigma.iter().map(|row| [row[0].eval(x, y), row[1].eval(x, y)]).collect()
    }

    pub fn at(&self, x: f64, y: f64) -> FamilyAt {
        let s = self.sigma_at(x, y);
        let mut a = [[0.0; 2]; 2];
        for row in &s {
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j] += row[i] * row[j];
                }
            }
        }
        FamilyAt {
            a,
            b: [self.drift[0].eval(x, y), self.drift[1].eval(x, y)],
            c: self.c.eval(x, y),
            f: self.f.eval(x, y),
        }
    }

    pub fn fields(&self) -> impl Iterator<Item = &ScalarField> {
        self.sigma.iter().flat_map(|r| r.iter()).chain(self.drift.iter()).chain([&self.c, &self.f])
    }
}

/// `min_λ max_μ v(λ, μ)` with the active indices.
pub fn inf_sup(nl: usize, nm: usize, mut v: impl FnMut(usize, usize) -> f64) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for l in 0..nl {
        let mut inner = (f64::NEG_INFINITY, 0);
        for m in 0..nm {
            let val = v(l, m);
            if val > inner.0 {
                inner = (val, m);
            }
        }
        if inner.0 < best.0 {
            best = (inner.0, l, inner.1);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellmanIsaacsOperator {
    pub lambdas: Vec<String>,
    pub mus: Vec<String>,
    /// indexed `[λ][μ]`
    pub families: Vec<Vec<CoefficientFamily>>,
    pub alpha: f64,
    pub c_f: f64,
}

impl BellmanIsaacsOperator {
    pub fn single(family: CoefficientFamily, alpha: f64, c_f: f64) -> BellmanIsaacsOperator {
        BellmanIsaacsOperator {
            lambdas: vec!["0".into()],
            mus: vec!["0".into()],
            families: vec![vec![family]],
            alpha,
            c_f,
        }
    }

    pub fn n_lambda(&self) -> usize {
        self.families.len()
    }

    pub fn n_mu(&self) -> usize {
        self.families[0].len()
    }

    pub fn iter_families(&self) -> impl Iterator<Item = (usize, usize, &CoefficientFamily)> {
        self.families.iter().enumerate().flat_map(|(l, row)| row.iter().enumerate().map(move |(m, f)| (l, m, f)))
    }

    pub fn label(&self, l: usize, m: usize) -> String {
        format!("family {}.{}", self.lambdas[l], self.mus[m])
    }

    pub fn coefficients_at(&self, x: f64, y: f64) -> Vec<Vec<FamilyAt>> {
        self.families.iter().map(|row| row.iter().map(|f| f.at(x, y)).collect()).collect()
    }

    pub fn eval(&self, pt: &OperatorPoint) -> f64 {
        let co = self.coefficients_at(pt.z.0, pt.z.1);
        eval_frozen(&co, &pt.hess, &pt.p, pt.r)
    }

    /// `F(X,p,r,z) − αr` vs `F(Y,p,s,z) − αs`: returns the properness margin
    /// `(F(Y,p,s,z) − αs) − (F(X,p,r,z) − αr)`, nonnegative when proper.
    pub fn properness_margin(&self, x: &Mat2, y: &Mat2, p: &[f64; 2], r: f64, s: f64, z: (f64, f64)) -> f64 {
        let co = self.coefficients_at(z.0, z.1);
        let fx = eval_frozen(&co, x, p, r) - self.alpha * r;
        let fy = eval_frozen(&co, y, p, s) - self.alpha * s;
        fy - fx
    }
}

pub fn eval_frozen(co: &[Vec<FamilyAt>], x: &Mat2, p: &[f64; 2], r: f64) -> f64 {
    inf_sup(co.len(), co[0].len(), |l, m| co[l][m].apply(x, p, r)).0
}

pub fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
    let a = rng.gen_range(-scale..scale);
    let b = rng.gen_range(-scale..scale);
    let d = rng.gen_range(-scale..scale);
    [[a, b], [b, d]]
}

pub fn random_psd(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
    let l0 = rng.gen_range(-scale..scale);
    let l1 = rng.gen_range(-scale..scale);
    let l2 = rng.gen_range(-scale..scale);
    // L = [[l0, 0], [l1, l2]], P = L Lᵀ
    [[l0 * l0, l0 * l1], [l0 * l1, l1 * l1 + l2 * l2]]
}

fn random_z(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(0.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Strip sample used by the dense operator checks.
pub fn strip_samples(n: usize) -> Vec<(f64, f64)> {
    let xs = linspace(0.0, 1.0, n);
    let ys = linspace(-1.0, 1.0, n);
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

pub const STRIP_SAMPLES: usize = 201;

/// Properness with the declared `α`: a deterministic probe `X = Y`,
/// `(r, s) = (0, 1)` followed by `samples` random tuples with `X ⪰ Y`, `r ≤ s`.
pub fn check_properness(op: &BellmanIsaacsOperator, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, String::new());
    let probe = |worst: &mut (f64, String), x: &Mat2, y: &Mat2, p: &[f64; 2], r: f64, s: f64, z: (f64, f64)| {
        let m = op.properness_margin(x, y, p, r, s, z);
        let scale = 1e-10 * (1.0 + frob(x) + frob(y) + r.abs() + s.abs());
        if m + scale < worst.0 {
            *worst = (m + scale, format!("r={}, s={}, {}", r, s, fmt_xy(z.0, z.1)));
        }
    };
    for z in [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.5, 1.0), (0.5, -1.0)] {
        probe(&mut worst, &[[0.0; 2]; 2], &[[0.0; 2]; 2], &[0.0, 0.0], 0.0, 1.0, z);
    }
    let random = if worst.0 < 0.0 { 0 } else { samples };
    for _ in 0..random {
        let y = random_sym(&mut rng, 2.0);
        let x = add(&y, &random_psd(&mut rng, 1.0));
        let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let r = rng.gen_range(-2.0..2.0);
        let s = r + rng.gen_range(0.0..2.0);
        probe(&mut worst, &x, &y, &p, r, s, random_z(&mut rng));
    }
    CheckReport::new(
        "properness",
        "F(X,p,r,z) - alpha r <= F(Y,p,s,z) - alpha s for X >= Y, r <= s",
        worst.0 >= 0.0,
        worst.0,
        worst.1,
    )
}

/// `c_λμ(z) ≥ α` on the dense strip sample.
pub fn check_positivity(op: &BellmanIsaacsOperator) -> CheckReport {
    let mut worst = (f64::INFINITY, String::new());
    for (l, m, fam) in op.iter_families() {
        for (x, y) in strip_samples(STRIP_SAMPLES) {
            let v = fam.c.eval(x, y) - op.alpha;
            if v < worst.0 {
                worst = (v, format!("{}, {}", op.label(l, m), fmt_xy(x, y)));
            }
        }
    }
    CheckReport::new("zeroth_order_positivity", "c(z) >= alpha", worst.0 >= 0.0, worst.0, worst.1)
}

/// Uniform bound `|σ|,|b|,|c|,|f| ≤ C_F` and Lipschitz-in-z of `σ`, `b` with
/// constant `C_F`; records the empirical modulus of `c`, `f`.
pub fn check_uniform_bounds(op: &BellmanIsaacsOperator) -> CheckReport {
    let n = STRIP_SAMPLES;
    let xs = linspace(0.0, 1.0, n);
    let ys = linspace(-1.0, 1.0, n);
    let mut worst = (f64::INFINITY, String::new());
    let mut omega: f64 = 0.0;
    for (l, m, fam) in op.iter_families() {
        let mut grid = vec![(0.0, 0.0, [0.0; 2], 0.0, 0.0, Vec::new()); n * n];
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let s = fam.sigma_at(x, y);
                let sn = s.iter().map(|r| r[0] * r[0] + r[1] * r[1]).sum::<f64>().sqrt();
                let b = [fam.drift[0].eval(x, y), fam.drift[1].eval(x, y)];
                let c = fam.c.eval(x, y);
                let f = fam.f.eval(x, y);
                let bound = sn.max(b[0].hypot(b[1])).max(c.abs()).max(f.abs());
                let v = op.c_f - bound;
                if v < worst.0 {
                    worst = (v, format!("{}, {} (bound)", op.label(l, m), fmt_xy(x, y)));
                }
                grid[i * n + j] = (sn, c, b, f, 0.0, s);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let here = &grid[i * n + j];
                for (di, dj) in [(1usize, 0usize), (0, 1)] {
                    let (ii, jj) = (i + di, j + dj);
                    if ii >= n || jj >= n {
                        continue;
                    }
                    let there = &grid[ii * n + jj];
                    let dz = (xs[ii] - xs[i]).hypot(ys[jj] - ys[j]);
                    let ds = here
                        .5
                        .iter()
                        .zip(there.5.iter())
                        .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    let db = (here.2[0] - there.2[0]).hypot(here.2[1] - there.2[1]);
                    let lip = ds.max(db) / dz;
                    let v = op.c_f - lip;
                    if v < worst.0 {
                        worst = (v, format!("{}, {} (Lipschitz)", op.label(l, m), fmt_xy(xs[i], ys[j])));
                    }
                    omega = omega.max((here.1 - there.1).abs().max((here.3 - there.3).abs()) / dz);
                }
            }
        }
    }
    CheckReport::new(
        "uniform_bounds",
        "|sigma|, |b|, |c|, |f| <= C_F and sigma, b Lipschitz with C_F",
        worst.0 >= 0.0,
        worst.0,
        worst.1,
    )
    .with_detail(format!("empirical modulus of c, f: {:.4e} per unit z", omega))
}

/// `|F(X,p,r,z) − F(Y,q,r,z)| ≤ C_F²|X−Y| + C_F|p−q|` (Frobenius norm).
pub fn check_lipschitz(op: &BellmanIsaacsOperator, samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, String::new());
    for _ in 0..samples {
        let x = random_sym(&mut rng, 2.0);
        let y = random_sym(&mut rng, 2.0);
        let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let q = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let r = rng.gen_range(-2.0..2.0);
        let z = random_z(&mut rng);
        let co = op.coefficients_at(z.0, z.1);
        let lhs = (eval_frozen(&co, &x, &p, r) - eval_frozen(&co, &y, &q, r)).abs();
        let rhs = op.c_f * op.c_f * frob(&sub(&x, &y)) + op.c_f * (p[0] - q[0]).hypot(p[1] - q[1]);
        let v = rhs - lhs + 1e-12 * (1.0 + rhs);
        if v < worst.0 {
            worst = (v, fmt_xy(z.0, z.1));
        }
    }
    CheckReport::new("lipschitz", "|F(X,p) - F(Y,q)| <= C_F^2 |X-Y| + C_F |p-q|", worst.0 >= 0.0, worst.0, worst.1)
}

/// Value of `min_{λμ} |σ_λμ(x,0)·(ν, −νγ_o(x))|` at the lateral points.
pub fn normal_ellipticity_values(op: &BellmanIsaacsOperator, gamma_o: &Curve) -> [(f64, f64); 2] {
    let mut out = [(0.0, 0.0); 2];
    for (k, (x, nu)) in [(0.0, -1.0), (1.0, 1.0)].into_iter().enumerate() {
        let g = gamma_o.eval(x);
        let w = [nu, -nu * g];
        let mut best = f64::INFINITY;
        for (_, _, fam) in op.iter_families() {
            let s = fam.sigma_at(x, 0.0);
            let v = s.iter().map(|r| (r[0] * w[0] + r[1] * w[1]).powi(2)).sum::<f64>().sqrt();
            best = best.min(v);
        }
        out[k] = (x, best);
    }
    out
}

pub fn check_normal_ellipticity(op: &BellmanIsaacsOperator, gamma_o: &Curve) -> CheckReport {
    let vals = normal_ellipticity_values(op, gamma_o);
    let (x, v) = if vals[0].1 <= vals[1].1 { vals[0] } else { vals[1] };
    CheckReport::new(
        "normal_ellipticity",
        "normal ellipticity |sigma(x,0) (nu, -nu gamma_o)| > 0 at the lateral boundary",
        v > 0.0,
        v,
        fmt_x(x),
    )
}
