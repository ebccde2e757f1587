//! Monotone finite-difference schemes for the thin and limit problems,
//! their solution, and barrier bounds.

pub mod band;
pub mod barriers;
pub mod grid;
pub mod line;
pub mod scheme;
pub mod solve;
pub mod thin;

pub use barriers::{build_barriers, check_barrier_sandwich, Barriers, SandwichReport};
pub use grid::{sup_norm_error, GridFunction};
pub use line::{discretize_limit, discretize_limit_with};
pub use scheme::{BoundaryOp, DiscreteScheme, Layout, LinRow, NodeRows};
pub use solve::{solve, solve_from, SolveReport};
pub use thin::{discretize_thin, discretize_thin_with};

use crate::problem::{CornerRule, Method, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossScheme {
    SevenPointSplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub nx: usize,
    pub nt: usize,
    pub nx_limit: usize,
    pub damping: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub cross_scheme: CrossScheme,
    pub corner_rule: CornerRule,
    pub method: Method,
}

impl SchemeConfig {
    pub fn from_settings(s: &SolverSettings) -> SchemeConfig {
        SchemeConfig {
            nx: s.nx,
            nt: s.nt,
            nx_limit: s.nx_limit,
            damping: s.damping,
            tol: s.tol,
            max_iter: s.max_iter,
            cross_scheme: CrossScheme::SevenPointSplit,
            corner_rule: s.corner_rule,
            method: s.method,
        }
    }
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig::from_settings(&SolverSettings::default())
    }
}
