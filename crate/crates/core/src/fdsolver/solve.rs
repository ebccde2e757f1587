use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdsolver::grid::GridFunction;
use crate::fdsolver::scheme::DiscreteScheme;
use crate::fdsolver::SchemeConfig;
use crate::problem::Method;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub sup_norm: f64,
    pub wall_time: f64,
    pub method: String,
    pub history: Vec<f64>,
}

const TAIL: usize = 5;

fn divergence(history: &[f64]) -> Error {
    Error::Divergence { iters: history.len(), tail: history[history.len().saturating_sub(TAIL)..].to_vec() }
}

/// Damping actually used by the fixed-point method, validated against the
/// scheme's Lipschitz bound.
pub fn damping_for(scheme: &DiscreteScheme, cfg: &SchemeConfig) -> Result<f64> {
    let l = scheme.lipschitz();
    let tau = cfg.damping.unwrap_or(0.4 / l);
    if !(tau > 0.0) || tau * l >= 2.0 {
        return Err(Error::Config(format!("damping tau = {} with Lipschitz bound {:.4} needs 0 < tau*L < 2", tau, l)));
    }
    Ok(tau)
}

pub fn solve(scheme: &DiscreteScheme, cfg: &SchemeConfig) -> Result<(GridFunction, SolveReport)> {
    solve_from(scheme, cfg, vec![0.0; scheme.len()])
}

pub fn solve_from(scheme: &DiscreteScheme, cfg: &SchemeConfig, u0: Vec<f64>) -> Result<(GridFunction, SolveReport)> {
    let start = Instant::now();
    let (u, history) = match cfg.method {
        Method::Policy => policy_iteration(scheme, cfg, u0)?,
        Method::Damped => damped_iteration(scheme, cfg, u0)?,
    };
    let gf = scheme.grid_function(u);
    if !gf.is_finite() {
        return Err(divergence(&history));
    }
    let report = SolveReport {
        iterations: history.len() - 1,
        final_residual: *history.last().unwrap(),
        sup_norm: gf.sup_norm(),
        wall_time: start.elapsed().as_secs_f64(),
        method: match cfg.method {
            Method::Policy => "policy".into(),
            Method::Damped => "damped".into(),
        },
        history,
    };
    Ok((gf, report))
}

/// Howard iteration on the active `(λ, μ)` with a residual line search.
fn policy_iteration(scheme: &DiscreteScheme, cfg: &SchemeConfig, mut u: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = scheme.residual_sup(&u);
    let mut history = vec![r];
    while r > cfg.tol {
        if history.len() > cfg.max_iter || !r.is_finite() {
            return Err(divergence(&history));
        }
        let (a, b) = scheme.linearize(&u);
        let target = a.solve(&b).ok_or_else(|| divergence(&history))?;
        let mut theta = 1.0;
        loop {
            let cand: Vec<f64> = u.iter().zip(&target).map(|(a, b)| a + theta * (b - a)).collect();
            let rc = scheme.residual_sup(&cand);
            if rc < r || theta < 1e-3 {
                u = cand;
                r = rc;
                break;
            }
            theta *= 0.5;
        }
        history.push(r);
    }
    Ok((u, history))
}

/// `u ← u − τ S(u)` with the normalized residual `S`.
fn damped_iteration(scheme: &DiscreteScheme, cfg: &SchemeConfig, mut u: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let tau = damping_for(scheme, cfg)?;
    let mut s = scheme.residual(&u);
    let mut r = s.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let mut history = vec![r];
    while r > cfg.tol {
        if history.len() > cfg.max_iter || !r.is_finite() {
            return Err(divergence(&history));
        }
        for (ui, si) in u.iter_mut().zip(&s) {
            *ui -= tau * si;
        }
        s = scheme.residual(&u);
        r = s.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        history.push(r);
    }
    Ok((u, history))
}
