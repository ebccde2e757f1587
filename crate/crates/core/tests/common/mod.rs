//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use thin_oblique::problem::config::ProblemConfig;
use thin_oblique::problem::ProblemInstance;

pub fn problem_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

pub fn load(name: &str) -> ProblemInstance {
    ProblemInstance::from_file(problem_path(name), true).unwrap()
}

pub fn load_lenient(name: &str) -> ProblemInstance {
    ProblemInstance::from_file(problem_path(name), false).unwrap()
}

pub fn instance(text: &str) -> ProblemInstance {
    ProblemInstance::from_config(ProblemConfig::parse(text).unwrap(), true).unwrap()
}

/// Solution of `−u'' + u = 1` on `(0, ε)` with `u'(0) = 0`, `u'(ε) = 1`,
/// written with exponentials.
pub fn counterexample_exact(eps: f64, y: f64) -> f64 {
    (y.exp() + (-y).exp()) / (eps.exp() - (-eps).exp()) + 1.0
}

/// `coth ε + 1` through its Laurent series, accurate for small ε.
pub fn coth_plus_one_series(eps: f64) -> f64 {
    1.0 / eps + eps / 3.0 - eps.powi(3) / 45.0 + 2.0 * eps.powi(5) / 945.0 - eps.powi(7) / 4725.0 + 1.0
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn eig2(a: [[f64; 2]; 2]) -> (f64, f64) {
    let m = 0.5 * (a[0][0] + a[1][1]);
    let d = (0.25 * (a[0][0] - a[1][1]).powi(2) + a[0][1] * a[1][0]).sqrt();
    (m - d, m + d)
}

/// `t(x, y) = (y/ε − g⁻(x)) / (g⁺(x) − g⁻(x))`, differentiated numerically
/// with step `h`.
pub fn map_derivatives(gm: impl Fn(f64) -> f64, gp: impl Fn(f64) -> f64, eps: f64, x: f64, y: f64) -> (f64, f64) {
    let t = |x: f64, y: f64| (y / eps - gm(x)) / (gp(x) - gm(x));
    let h = 1e-6;
    ((t(x + h, y) - t(x - h, y)) / (2.0 * h), (t(x, y + h) - t(x, y - h)) / (2.0 * h))
}

/// Laplacian problem on the flat strip with oblique data `γ_o = x/2`,
/// `β_o = 1/4`.
pub const LAPLACIAN: &str = "laplacian_oblique.prob";
pub const BI: &str = "bi_two_family.prob";
pub const VALID: [&str; 4] = ["laplacian_oblique.prob", "bi_two_family.prob", "oblique_lateral.prob", "dirichlet.prob"];
