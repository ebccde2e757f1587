//! Thin-domain oblique boundary problems for fully nonlinear operators of
//! Bellman-Isaacs type, their one-dimensional limit, and finite-difference
//! solvers for both.

pub mod check;
pub mod cli;
pub mod error;
pub mod expr;
pub mod fdsolver;
pub mod field;
pub mod harness;
pub mod limit;
pub mod operators;
pub mod problem;

pub use error::{Error, Result};
