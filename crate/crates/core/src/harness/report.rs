//! CSV and JSON renderings of harness reports.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::counterexample::CounterexampleReport;
use crate::harness::manufactured::MmsReport;
use crate::harness::sweep::ConvergenceReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const SWEEP_HEADER: &str = "eps,sup_error,iters,residual,barrier_margin,wall_s";

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Config(e.to_string()))
}

pub fn sweep_csv(rep: &ConvergenceReport) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in &rep.rows {
        s.push_str(&format!("{:?},{:?},{},{:?},{:?},{:?}\n", r.eps, r.sup_error, r.iters, r.residual, r.barrier_margin, r.wall_s));
    }
    s
}

pub fn counterexample_csv(rep: &CounterexampleReport) -> String {
    let mut s = String::from("eps,sup,exact_sup,rel_error,iters\n");
    for r in &rep.rows {
        s.push_str(&format!("{:?},{:?},{:?},{:?},{}\n", r.eps, r.sup, r.exact_sup, r.rel_error, r.iters));
    }
    s
}

pub fn mms_csv(rep: &MmsReport) -> String {
    let mut s = String::from("nx,nt,error,order\n");
    for (k, l) in rep.levels.iter().enumerate() {
        let order = if k == 0 { String::new() } else { format!("{:?}", rep.orders[k - 1]) };
        s.push_str(&format!("{},{},{:?},{}\n", l.nx, l.nt, l.error, order));
    }
    s
}
