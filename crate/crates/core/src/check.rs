use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of one sampled hypothesis check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    /// the inequality or identity being checked, in words
    pub what: String,
    pub pass: bool,
    /// worst sampled margin (positive is good) or worst mismatch, see `what`
    pub value: f64,
    pub witness: String,
    pub detail: String,
}

impl CheckReport {
    pub fn new(name: &str, what: &str, pass: bool, value: f64, witness: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.into(),
            what: what.into(),
            pass,
            value,
            witness: witness.into(),
            detail: String::new(),
        }
    }

    pub fn skipped(name: &str, what: &str, why: &str) -> CheckReport {
        CheckReport { detail: format!("not applicable: {}", why), ..CheckReport::new(name, what, true, 0.0, "") }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> CheckReport {
        self.detail = d.into();
        self
    }

    pub fn into_result(self) -> Result<()> {
        if self.pass {
            Ok(())
        } else {
            Err(Error::invariant(self.what, self.witness))
        }
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{:<4} {:<26} value={:<12.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value
        );
        if !self.witness.is_empty() {
            s.push_str(&format!(" witness: {}", self.witness));
        }
        if !self.detail.is_empty() {
            s.push_str(&format!(" ({})", self.detail));
        }
        s
    }
}

/// `n` equispaced points on `[a, b]` including both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn fmt_x(x: f64) -> String {
    format!("x={}", trim_float(x))
}

pub fn fmt_xy(x: f64, y: f64) -> String {
    format!("x={}, y={}", trim_float(x), trim_float(y))
}

pub fn trim_float(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
