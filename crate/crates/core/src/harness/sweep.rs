use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdsolver::{
    build_barriers, check_barrier_sandwich, discretize_limit, discretize_thin, solve, sup_norm_error, GridFunction,
    SchemeConfig, SolveReport,
};
use crate::harness::checks::run_checks_with;
use crate::limit::LimitOperator;
use crate::problem::ProblemInstance;

pub const SANDWICH_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub eps_list: Vec<f64>,
    pub cfg: SchemeConfig,
    pub samples: usize,
    pub seed: u64,
    /// record wall-clock times (otherwise reported as 0 for reproducible output)
    pub timings: bool,
}

impl SweepConfig {
    pub fn new(inst: &ProblemInstance, eps_list: Vec<f64>) -> SweepConfig {
        SweepConfig {
            eps_list,
            cfg: SchemeConfig::from_settings(&inst.solver),
            samples: inst.solver.samples,
            seed: inst.solver.seed,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub sup_error: f64,
    pub iters: usize,
    pub residual: f64,
    pub barrier_margin: f64,
    pub wall_s: f64,
    pub sandwich_pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitDigest {
    pub nx: usize,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    pub limit: LimitDigest,
}

impl ConvergenceReport {
    pub fn all_solved(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none())
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error)
    }
}

/// Thin solve at one ε and its distance to the limit solution.
pub fn solve_thin_at(
    inst: &ProblemInstance,
    eps: f64,
    cfg: &SchemeConfig,
) -> Result<(GridFunction, SolveReport)> {
    let scheme = discretize_thin(inst, eps, cfg)?;
    solve(&scheme, cfg)
}

pub fn solve_limit(inst: &ProblemInstance, cfg: &SchemeConfig) -> Result<(GridFunction, SolveReport)> {
    let limop = LimitOperator::from_instance(inst);
    let scheme = discretize_limit(&limop, &inst.lateral, cfg)?;
    solve(&scheme, cfg)
}

fn validate_eps_list(inst: &ProblemInstance, eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::Config("empty eps list".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("eps list must be positive and strictly decreasing, got {:?}", eps_list)));
    }
    let thr = inst.eps_threshold();
    if eps_list[0] >= thr {
        return Err(Error::invariant(
            format!("eps below the obliqueness threshold {:.6}", thr),
            format!("eps={}", eps_list[0]),
        ));
    }
    Ok(())
}

/// Solves the limit problem once, then the thin problem for every ε in
/// parallel; divergence at one ε is recorded in its row.
pub fn run_sweep(inst: &ProblemInstance, sweep: &SweepConfig) -> Result<(ConvergenceReport, GridFunction)> {
    validate_eps_list(inst, &sweep.eps_list)?;
    run_checks_with(inst, sweep.eps_list[0], sweep.samples, sweep.seed).into_result()?;
    let cfg = &sweep.cfg;
    let (u0, lrep) = solve_limit(inst, cfg)?;
    let rows = sweep
        .eps_list
        .par_iter()
        .map(|&eps| {
            let start = Instant::now();
            let mut row = SweepRow {
                eps,
                sup_error: f64::NAN,
                iters: 0,
                residual: f64::NAN,
                barrier_margin: f64::NAN,
                wall_s: 0.0,
                sandwich_pass: false,
                error: None,
            };
            let res = solve_thin_at(inst, eps, cfg).and_then(|(u, rep)| {
                row.sup_error = sup_norm_error(&u, &u0);
                row.iters = rep.iterations;
                row.residual = rep.final_residual;
                let bars = build_barriers(inst, eps, cfg, true)?;
                let sw = check_barrier_sandwich(&u, &bars, SANDWICH_TOL)?;
                row.barrier_margin = sw.margin();
                row.sandwich_pass = sw.pass;
                Ok(())
            });
            if let Err(e) = res {
                row.error = Some(e.to_string());
            }
            if sweep.timings {
                row.wall_s = start.elapsed().as_secs_f64();
            }
            row
        })
        .collect();
    let limit = LimitDigest { nx: cfg.nx_limit, iterations: lrep.iterations, residual: lrep.final_residual };
    Ok((ConvergenceReport { rows, limit }, u0))
}
