//! Refinement studies against exact solutions: the source of every family
//! is shifted so that the exact field solves the discretized equation up to
//! truncation error, and boundary data are taken from the exact field.

use serde::Serialize;

use crate::error::Result;
use crate::fdsolver::{discretize_limit_with, discretize_thin_with, solve, SchemeConfig};
use crate::field::ScalarField;
use crate::limit::LimitOperator;
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Serialize)]
pub struct MmsLevel {
    pub nx: usize,
    pub nt: usize,
    pub error: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MmsReport {
    pub exact: String,
    pub thin: bool,
    pub eps: Option<f64>,
    pub levels: Vec<MmsLevel>,
    /// `log₂(e_k / e_{k+1})`
    pub orders: Vec<f64>,
    /// `e_k / e_{k+1}`
    pub ratios: Vec<f64>,
    pub observed_order: f64,
}

/// `(base − 1)·2^k + 1`, so that every level contains the previous one.
pub fn level_size(base: usize, k: usize) -> usize {
    (base - 1) * (1 << k) + 1
}

fn finish(exact: &ScalarField, thin: bool, eps: Option<f64>, levels: Vec<MmsLevel>) -> MmsReport {
    let ratios: Vec<f64> = levels.windows(2).map(|w| w[0].error / w[1].error).collect();
    let orders: Vec<f64> = ratios.iter().map(|r| r.log2()).collect();
    let observed_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    MmsReport { exact: exact.expr.to_string(), thin, eps, levels, orders, ratios, observed_order }
}

/// Limit-problem study on `levels` grids starting from `cfg.nx_limit`.
pub fn run_manufactured(inst: &ProblemInstance, exact: &ScalarField, levels: usize, cfg: &SchemeConfig) -> Result<MmsReport> {
    let limop = LimitOperator::from_instance(inst);
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let c = SchemeConfig { nx_limit: level_size(cfg.nx_limit, k), ..cfg.clone() };
        let scheme = discretize_limit_with(&limop, &inst.lateral, &c, Some(exact))?;
        let (u, rep) = solve(&scheme, &c)?;
        let error = u.points.iter().zip(&u.values).fold(0.0, |m: f64, (p, v)| m.max((v - exact.eval(p.0, 0.0)).abs()));
        out.push(MmsLevel { nx: c.nx_limit, nt: 1, error, iters: rep.iterations });
    }
    Ok(finish(exact, false, None, out))
}

/// Thin-problem study at fixed ε, refining `nx` and `nt` together.
pub fn run_manufactured_thin(
    inst: &ProblemInstance,
    exact: &ScalarField,
    eps: f64,
    levels: usize,
    cfg: &SchemeConfig,
) -> Result<MmsReport> {
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let c = SchemeConfig { nx: level_size(cfg.nx, k), nt: level_size(cfg.nt, k), ..cfg.clone() };
        let scheme = discretize_thin_with(inst, eps, &c, Some(exact))?;
        let (u, rep) = solve(&scheme, &c)?;
        let error = u.points.iter().zip(&u.values).fold(0.0, |m: f64, (p, v)| m.max((v - exact.eval(p.0, p.1)).abs()));
        out.push(MmsLevel { nx: c.nx, nt: c.nt, error, iters: rep.iterations });
    }
    Ok(finish(exact, true, Some(eps), out))
}
