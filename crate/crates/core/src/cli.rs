//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::check::linspace;
use crate::error::{Error, Result};
use crate::fdsolver::{GridFunction, SchemeConfig, SolveReport};
use crate::field::{Domain, ScalarField};
use crate::harness::report::{self, Format};
use crate::harness::{self, counterexample, SweepConfig};
use crate::limit::LimitOperator;
use crate::problem::config::ProblemConfig;
use crate::problem::ProblemInstance;

#[derive(Debug, Parser)]
#[command(name = "thin-oblique", version, about = "Thin-domain oblique problems and their one-dimensional limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Override a problem key after the file is read, e.g. `--set solver.nx=401` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Seed for the randomized checks (overrides solver.seed)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Machine-readable output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the machine-readable output here instead of stdout
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Also write the solver report as JSON to this path
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Record wall-clock times (reported as 0 otherwise, keeping output reproducible)
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the hypothesis battery on a problem file
    Check {
        problem: PathBuf,
        /// ε at which top/bottom obliqueness is evaluated (default solver.eps)
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the limit coefficients and reduced families on the limit grid
    Reduce {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the thin problem at one ε and dump the solution
    SolveThin {
        problem: PathBuf,
        /// Thickness parameter ε
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the limit problem and dump the solution
    SolveLimit {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the limit problem once and the thin problem for each ε
    Sweep {
        problem: PathBuf,
        /// Strictly decreasing comma-separated ε values, e.g. `0.2,0.1,0.05`
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        eps_list: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce the blow-up of the built-in incompatible problem
    Counterexample {
        /// Grid points across the thin direction
        #[arg(long, default_value_t = 200)]
        nt: usize,
        /// Comma-separated ε values
        #[arg(long, value_delimiter = ',', default_values_t = counterexample::DEFAULT_EPS.to_vec())]
        eps_list: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Manufactured-solution refinement study
    Mms {
        problem: PathBuf,
        /// Exact solution, in x for the limit problem or in x and y with --thin
        #[arg(long)]
        exact: String,
        /// Number of refinement levels, each doubling the mesh
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Study the thin problem instead of the limit problem
        #[arg(long)]
        thin: bool,
        /// ε for the thin study (default solver.eps)
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path, common: &Common, strict: bool) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {}", path.display(), e)))?;
    let mut cfg = ProblemConfig::parse(&text)?;
    for o in &common.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = common.seed {
        cfg.apply_override(&format!("solver.seed={}", seed))?;
    }
    ProblemInstance::from_config(cfg, strict)
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.output {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn emit_report(common: &Common, rep: &SolveReport) -> Result<()> {
    if let Some(p) = &common.report {
        let mut rep = rep.clone();
        if !common.timings {
            rep.wall_time = 0.0;
        }
        std::fs::write(p, report::to_json(&rep)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolutionDump<'a> {
    report: &'a SolveReport,
    solution: &'a GridFunction,
}

fn emit_solution(common: &Common, u: &GridFunction, rep: &SolveReport) -> Result<()> {
    let mut rep = rep.clone();
    if !common.timings {
        rep.wall_time = 0.0;
    }
    emit_report(common, &rep)?;
    let body = match common.format {
        Format::Csv => u.to_csv(),
        Format::Json => report::to_json(&SolutionDump { report: &rep, solution: u })?,
    };
    emit(common, &body)
}

fn reduce_table(inst: &ProblemInstance) -> (Vec<String>, Vec<Vec<f64>>) {
    let limop = LimitOperator::from_instance(inst);
    let co = &limop.coeffs;
    let mut header: Vec<String> =
        ["x", "gamma_o", "beta_o", "b", "c", "k_plus", "k_minus", "l_plus", "l_minus"].map(String::from).to_vec();
    for (l, m, _) in inst.operator.iter_families() {
        let lab = inst.operator.label(l, m);
        for q in ["a", "b", "c", "f"] {
            header.push(format!("{}[{}]", q, lab));
        }
    }
    let rows = linspace(0.0, 1.0, inst.solver.nx_limit)
        .into_iter()
        .map(|x| {
            let mut r = vec![
                x,
                co.gamma_o.eval(x),
                co.beta_o.eval(x),
                co.b.eval(x),
                co.c.eval(x),
                co.k_plus.eval(x),
                co.k_minus.eval(x),
                co.l_plus.eval(x),
                co.l_minus.eval(x),
            ];
            for fam in limop.reduced_at(x).iter().flatten() {
                r.extend([fam.a, fam.b, fam.c, fam.f]);
            }
            r
        })
        .collect();
    (header, rows)
}

fn table_body(format: Format, header: &[String], rows: &[Vec<f64>]) -> Result<String> {
    Ok(match format {
        Format::Csv => {
            let mut s = header.join(",") + "\n";
            for r in rows {
                s.push_str(&r.iter().map(|v| format!("{:?}", v)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().cloned().zip(r.iter().map(|v| serde_json::json!(v))).collect())
                .collect();
            report::to_json(&objs)?
        }
    })
}

fn run_command(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Check { problem, eps, common } => {
            let inst = load(&problem, &common, false)?;
            let eps = eps.unwrap_or(inst.solver.eps);
            let battery = harness::run_checks_with(&inst, eps, inst.solver.samples, inst.solver.seed);
            eprint!("{}", battery.to_text());
            let body = match common.format {
                Format::Json => report::to_json(&battery)?,
                Format::Csv => {
                    let mut s = String::from("name,pass,value,witness\n");
                    for c in &battery.checks {
                        s.push_str(&format!("{},{},{:?},\"{}\"\n", c.name, c.pass, c.value, c.witness));
                    }
                    s
                }
            };
            emit(&common, &body)?;
            Ok(if battery.pass { 0 } else { 1 })
        }
        Command::Reduce { problem, common } => {
            let inst = load(&problem, &common, true)?;
            let (header, rows) = reduce_table(&inst);
            emit(&common, &table_body(common.format, &header, &rows)?)?;
            Ok(0)
        }
        Command::SolveThin { problem, eps, common } => {
            let inst = load(&problem, &common, true)?;
            let cfg = SchemeConfig::from_settings(&inst.solver);
            let (u, rep) = harness::solve_thin_at(&inst, eps, &cfg)?;
            emit_solution(&common, &u, &rep)?;
            Ok(0)
        }
        Command::SolveLimit { problem, common } => {
            let inst = load(&problem, &common, true)?;
            let cfg = SchemeConfig::from_settings(&inst.solver);
            let (u, rep) = harness::solve_limit(&inst, &cfg)?;
            emit_solution(&common, &u, &rep)?;
            Ok(0)
        }
        Command::Sweep { problem, eps_list, common } => {
            let inst = load(&problem, &common, true)?;
            let mut sweep = SweepConfig::new(&inst, eps_list);
            sweep.timings = common.timings;
            let (rep, _) = harness::run_sweep(&inst, &sweep)?;
            let body = match common.format {
                Format::Csv => report::sweep_csv(&rep),
                Format::Json => report::to_json(&rep)?,
            };
            emit(&common, &body)?;
            for r in &rep.rows {
                if let Some(e) = &r.error {
                    eprintln!("eps={}: {}", r.eps, e);
                }
            }
            Ok(if rep.rows.iter().any(|r| r.error.as_deref().is_some_and(|e| e.contains("did not converge"))) {
                2
            } else if rep.all_solved() && rep.rows.iter().all(|r| r.sandwich_pass) {
                0
            } else {
                1
            })
        }
        Command::Counterexample { nt, eps_list, common } => {
            let rep = harness::run_counterexample(nt, &eps_list)?;
            let body = match common.format {
                Format::Csv => report::counterexample_csv(&rep),
                Format::Json => report::to_json(&rep)?,
            };
            emit(&common, &body)?;
            for r in &rep.rows {
                eprintln!(
                    "eps={}: sup={:.6} closed form {:.6}, relative sup error {:.3e}",
                    r.eps, r.sup, r.exact_sup, r.rel_error
                );
            }
            Ok(if rep.growing && rep.max_rel_error <= 0.01 { 0 } else { 1 })
        }
        Command::Mms { problem, exact, levels, thin, eps, common } => {
            let inst = load(&problem, &common, true)?;
            let domain = if thin { Domain::Strip } else { Domain::Line };
            let exact = ScalarField::parse("exact", &exact, domain)
                .map_err(|e| Error::Parse { line: 1, col: e.offset + 1, msg: e.message })?;
            let cfg = SchemeConfig::from_settings(&inst.solver);
            if levels < 2 {
                return Err(Error::Config("mms needs at least 2 levels".into()));
            }
            let rep = if thin {
                harness::run_manufactured_thin(&inst, &exact, eps.unwrap_or(inst.solver.eps), levels, &cfg)?
            } else {
                harness::run_manufactured(&inst, &exact, levels, &cfg)?
            };
            let body = match common.format {
                Format::Csv => report::mms_csv(&rep),
                Format::Json => report::to_json(&rep)?,
            };
            emit(&common, &body)?;
            eprintln!("observed order {:.3}", rep.observed_order);
            Ok(0)
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}
