use serde::Serialize;

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::limit::{check_degenerate_ellipticity, check_dual_path, check_limit_continuity, LimitOperator};
use crate::operators::{
    check_lipschitz, check_normal_ellipticity, check_positivity, check_properness, check_uniform_bounds,
};
use crate::problem::geometry::{check_obliqueness_tb, obliqueness_threshold};
use crate::problem::{LateralBC, ProblemInstance};

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

impl BatteryReport {
    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check as an error.
    pub fn into_result(self) -> Result<()> {
        match self.checks.into_iter().find(|c| !c.pass) {
            Some(c) => Err(Error::invariant(c.what, c.witness)),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s: String = self.checks.iter().map(|c| c.line() + "\n").collect();
        s.push_str(&format!(
            "{} of {} checks passed\n",
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        s
    }
}

/// Every hypothesis check on one instance, in a fixed order. Sampled checks
/// use `samples` draws from `seed`; top/bottom obliqueness is evaluated at
/// `eps`.
pub fn run_checks_with(inst: &ProblemInstance, eps: f64, samples: usize, seed: u64) -> BatteryReport {
    let limop = LimitOperator::from_instance(inst);
    let op = &inst.operator;
    let threshold = obliqueness_threshold(&inst.profile, &inst.oblique);
    let normal = match inst.lateral {
        LateralBC::Dirichlet { .. } => check_normal_ellipticity(op, &inst.oblique.gamma_o),
        _ => CheckReport::skipped(
            "normal_ellipticity",
            "normal ellipticity |sigma(x,0) (nu, -nu gamma_o)| > 0 at x in {0,1}",
            &format!("{} lateral condition", inst.lateral.kind()),
        ),
    };
    let checks = vec![
        inst.check_fields(),
        inst.profile.check(),
        check_obliqueness_tb(&inst.profile, &inst.oblique, eps).to_check(threshold),
        inst.oblique.check_compatibility(),
        inst.oblique.check_expansion(),
        check_properness(op, samples, seed),
        check_uniform_bounds(op),
        check_lipschitz(op, samples, seed),
        check_positivity(op),
        inst.lateral.check_obliqueness(),
        normal,
        check_degenerate_ellipticity(&limop, samples, seed),
        check_dual_path(&limop, samples, seed),
        check_limit_continuity(&limop, samples, seed),
    ];
    let pass = checks.iter().all(|c| c.pass);
    BatteryReport { checks, pass }
}

pub fn run_checks(inst: &ProblemInstance) -> BatteryReport {
    run_checks_with(inst, inst.solver.eps, inst.solver.samples, inst.solver.seed)
}
