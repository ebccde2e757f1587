//! Python bindings: problem loading, the hypothesis battery, thin and limit
//! solves, ε-sweeps, manufactured-solution studies and the counterexample.
//!
//! Structured results are returned as plain Python dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use thin_oblique::fdsolver::{GridFunction, SchemeConfig, SolveReport};
use thin_oblique::field::{Domain, ScalarField};
use thin_oblique::harness::{self, SweepConfig};
use thin_oblique::limit::LimitOperator;
use thin_oblique::problem::config::ProblemConfig;
use thin_oblique::problem::ProblemInstance;
use thin_oblique::Error;

create_exception!(thin_oblique, ThinObliqueError, PyException, "Base class of all errors raised by thin_oblique.");
create_exception!(thin_oblique, ParseError, ThinObliqueError, "Malformed problem text or expression.");
create_exception!(thin_oblique, ValidationError, ThinObliqueError, "A sampled hypothesis or invariant does not hold.");
create_exception!(thin_oblique, ConfigError, ThinObliqueError, "Invalid solver or run configuration.");
create_exception!(thin_oblique, DivergenceError, ThinObliqueError, "The nonlinear solver did not converge.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } => ParseError::new_err(msg),
        Error::Invariant { .. } | Error::Monotonicity { .. } => ValidationError::new_err(msg),
        Error::Divergence { .. } => DivergenceError::new_err(msg),
        Error::Config(_) | Error::Io(_) => ConfigError::new_err(msg),
    }
}

fn to_object<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| ConfigError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

#[derive(Serialize)]
struct Solution<'a> {
    x: Vec<f64>,
    y: Vec<f64>,
    u: &'a [f64],
    nx: usize,
    nt: usize,
    report: &'a SolveReport,
}

fn solution<'py>(py: Python<'py>, u: &GridFunction, rep: &SolveReport) -> PyResult<Bound<'py, PyAny>> {
    let sol = Solution {
        x: u.points.iter().map(|p| p.0).collect(),
        y: u.points.iter().map(|p| p.1).collect(),
        u: &u.values,
        nx: u.nx,
        nt: u.nt,
        report: rep,
    };
    to_object(py, &sol)
}

/// A parsed problem: domain profiles, oblique data, lateral condition,
/// Bellman-Isaacs operator and solver settings.
#[pyclass(name = "Problem", module = "thin_oblique")]
struct PyProblem {
    inst: ProblemInstance,
    strict: bool,
}

impl PyProblem {
    fn build(cfg: ProblemConfig, strict: bool) -> PyResult<PyProblem> {
        Ok(PyProblem { inst: ProblemInstance::from_config(cfg, strict).map_err(to_py)?, strict })
    }

    fn cfg(&self) -> SchemeConfig {
        SchemeConfig::from_settings(&self.inst.solver)
    }
}

#[pymethods]
impl PyProblem {
    /// Parses problem text. With `strict`, every sampled invariant is
    /// enforced at construction.
    #[staticmethod]
    #[pyo3(signature = (text, strict = true))]
    fn parse(text: &str, strict: bool) -> PyResult<PyProblem> {
        PyProblem::build(ProblemConfig::parse(text).map_err(to_py)?, strict)
    }

    #[staticmethod]
    #[pyo3(signature = (path, strict = true))]
    fn from_file(path: &str, strict: bool) -> PyResult<PyProblem> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new_err(format!("cannot read {path}: {e}")))?;
        PyProblem::parse(&text, strict)
    }

    /// A copy with `key = value` overrides applied, e.g. `{"solver.nx": "101"}`.
    fn with_overrides(&self, overrides: Vec<(String, String)>) -> PyResult<PyProblem> {
        let mut cfg = self.inst.config.clone();
        for (k, v) in overrides {
            cfg.apply_override(&format!("{k}={v}")).map_err(to_py)?;
        }
        PyProblem::build(cfg, self.strict)
    }

    /// Normalized problem text.
    fn to_text(&self) -> String {
        self.inst.config.to_text()
    }

    /// Largest ε accepted by the top/bottom obliqueness checks.
    fn eps_threshold(&self) -> f64 {
        self.inst.eps_threshold()
    }

    /// Runs the hypothesis battery; returns `{"checks": [...], "pass": bool}`.
    #[pyo3(signature = (eps = None, samples = None, seed = None))]
    fn check<'py>(&self, py: Python<'py>, eps: Option<f64>, samples: Option<usize>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inst.solver;
        let rep = py.detach(|| {
            harness::run_checks_with(&self.inst, eps.unwrap_or(s.eps), samples.unwrap_or(s.samples), seed.unwrap_or(s.seed))
        });
        to_object(py, &rep)
    }

    /// Limit operator `G(X, p, r, x)` evaluated through `F` and through the
    /// reduced families; the two agree to round-off.
    fn eval_limit(&self, xx: f64, p: f64, r: f64, x: f64) -> (f64, f64) {
        let g = LimitOperator::from_instance(&self.inst);
        (g.eval_direct(xx, p, r, x), g.eval_reduced(xx, p, r, x))
    }

    /// Limit coefficients `(gamma_o, beta_o, b, c)` at `x`.
    fn limit_coefficients(&self, x: f64) -> (f64, f64, f64, f64) {
        let co = LimitOperator::from_instance(&self.inst).coeffs.at(x);
        (co.gamma_o, co.beta_o, co.b, co.c)
    }

    /// Solves the limit problem on `solver.nx_limit` points.
    fn solve_limit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let cfg = self.cfg();
        let (u, rep) = py.detach(|| harness::solve_limit(&self.inst, &cfg)).map_err(to_py)?;
        solution(py, &u, &rep)
    }

    /// Solves the thin problem at `eps` on the fitted `solver.nx × solver.nt` grid.
    fn solve_thin<'py>(&self, py: Python<'py>, eps: f64) -> PyResult<Bound<'py, PyAny>> {
        let cfg = self.cfg();
        let (u, rep) = py.detach(|| harness::solve_thin_at(&self.inst, eps, &cfg)).map_err(to_py)?;
        solution(py, &u, &rep)
    }

    /// ε-sweep; `eps_list` must be strictly decreasing.
    #[pyo3(signature = (eps_list, timings = false))]
    fn sweep<'py>(&self, py: Python<'py>, eps_list: Vec<f64>, timings: bool) -> PyResult<Bound<'py, PyAny>> {
        let mut sc = SweepConfig::new(&self.inst, eps_list);
        sc.timings = timings;
        let (rep, _) = py.detach(|| harness::run_sweep(&self.inst, &sc)).map_err(to_py)?;
        to_object(py, &rep)
    }

    /// Manufactured-solution refinement study of the limit problem, or of the
    /// thin problem at `eps` when `thin` is set.
    #[pyo3(signature = (exact, levels = 3, thin = false, eps = None))]
    fn manufactured<'py>(
        &self,
        py: Python<'py>,
        exact: &str,
        levels: usize,
        thin: bool,
        eps: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let w = ScalarField::parse("exact", exact, Domain::Strip)
            .map_err(|e| ParseError::new_err(format!("exact solution: {}", e.message)))?;
        let cfg = self.cfg();
        let eps = eps.unwrap_or(self.inst.solver.eps);
        let rep = py
            .detach(|| {
                if thin {
                    harness::run_manufactured_thin(&self.inst, &w, eps, levels, &cfg)
                } else {
                    harness::run_manufactured(&self.inst, &w, levels, &cfg)
                }
            })
            .map_err(to_py)?;
        to_object(py, &rep)
    }

    fn __repr__(&self) -> String {
        let op = &self.inst.operator;
        format!(
            "Problem(lateral={}, families={}x{}, nx={}, nt={})",
            self.inst.lateral.kind(),
            op.n_lambda(),
            op.n_mu(),
            self.inst.solver.nx,
            self.inst.solver.nt
        )
    }
}

/// Solves the built-in incompatible problem and compares with its closed form.
#[pyfunction]
#[pyo3(signature = (nt = 200, eps_list = vec![0.4, 0.2, 0.1]))]
fn counterexample<'py>(py: Python<'py>, nt: usize, eps_list: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let rep = py.detach(|| harness::run_counterexample(nt, &eps_list)).map_err(to_py)?;
    to_object(py, &rep)
}

/// `coth ε + 1`, the supremum of the counterexample solution.
#[pyfunction]
fn counterexample_sup(eps: f64) -> f64 {
    harness::closed_form_sup(eps)
}

#[pymodule(name = "thin_oblique")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_sup, m)?)?;
    m.add("ThinObliqueError", py.get_type::<ThinObliqueError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("DivergenceError", py.get_type::<DivergenceError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
