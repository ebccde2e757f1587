//! The fixed problem `−u_yy + u = 1` on `(0,1)×(0,ε)` with `u_y(x,ε) = 1`,
//! `−u_y(x,0) = 0` and Neumann lateral data, whose top/bottom data are not
//! compatible and whose solutions blow up as `ε → 0`.

use serde::Serialize;

use crate::error::Result;
use crate::fdsolver::{discretize_thin, solve, SchemeConfig};
use crate::problem::config::ProblemConfig;
use crate::problem::ProblemInstance;

pub const COUNTEREXAMPLE: &str = "\
[domain]
g_plus = 1
g_minus = 0
h = 0.5
[oblique]
gamma1_plus = 0
gamma1_minus = 0
beta_plus = 1
beta_minus = 0
[lateral]
kind = neumann
[operator]
alpha = 1
c_f = 2
family.0.sigma = 0, 1
family.0.c = 1
family.0.f = 1
[solver]
nx = 5
nt = 200
";

pub const DEFAULT_EPS: [f64; 3] = [0.4, 0.2, 0.1];

/// `u^ε(y) = (e^y + e^{−y})/(e^ε − e^{−ε}) + 1`.
pub fn closed_form(eps: f64, y: f64) -> f64 {
    y.cosh() / eps.sinh() + 1.0
}

/// `sup u^ε = coth ε + 1`.
pub fn closed_form_sup(eps: f64) -> f64 {
    1.0 / eps.tanh() + 1.0
}

/// The counterexample instance; built without validation since it violates
/// compatibility by design.
pub fn counterexample_instance() -> ProblemInstance {
    ProblemInstance::from_config(ProblemConfig::parse(COUNTEREXAMPLE).expect("built-in problem parses"), false)
        .expect("built-in problem builds")
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleRow {
    pub eps: f64,
    pub sup: f64,
    pub exact_sup: f64,
    /// `max |u − u_exact| / sup |u_exact|`
    pub rel_error: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub nt: usize,
    pub rows: Vec<CounterexampleRow>,
    /// sup values increase as ε decreases
    pub growing: bool,
    pub max_rel_error: f64,
}

pub fn run_counterexample(nt: usize, eps_list: &[f64]) -> Result<CounterexampleReport> {
    let inst = counterexample_instance();
    let cfg = SchemeConfig { nt, ..SchemeConfig::from_settings(&inst.solver) };
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let scheme = discretize_thin(&inst, eps, &cfg)?;
        let (u, rep) = solve(&scheme, &cfg)?;
        let exact_sup = closed_form_sup(eps);
        let err = u.points.iter().zip(&u.values).fold(0.0, |m: f64, (p, v)| m.max((v - closed_form(eps, p.1)).abs()));
        rows.push(CounterexampleRow { eps, sup: u.sup_norm(), exact_sup, rel_error: err / exact_sup, iters: rep.iterations });
    }
    let mut sorted: Vec<&CounterexampleRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let growing = sorted.windows(2).all(|w| w[1].sup > w[0].sup);
    let max_rel_error = rows.iter().fold(0.0, |m: f64, r| m.max(r.rel_error));
    Ok(CounterexampleReport { nt, rows, growing, max_rel_error })
}
