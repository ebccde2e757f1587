//! Problem instances: profiles, oblique data, lateral condition, operator and
//! solver settings, built from a [`ProblemConfig`] and validated by sampling.

pub mod config;
pub mod geometry;

use std::path::Path;

use crate::check::{fmt_x, fmt_xy, linspace, CheckReport};
use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::field::{fd, Curve, Domain, ScalarField};
use crate::limit::coeffs::extract_slope;
use crate::operators::{self, BellmanIsaacsOperator, CoefficientFamily};

pub use config::ProblemConfig;
pub use geometry::{check_obliqueness_tb, outward_normal_tb, ObliquenessReport, Side, ThinGrid};

pub const LINE_SAMPLES: usize = 1001;
pub const COMPAT_TOL: f64 = 1e-10;
pub const SLOPE_AGREEMENT: f64 = 1e-6;
pub const EXTRACTION_RESIDUAL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct DomainProfile {
    pub g_minus: ScalarField,
    pub g_plus: ScalarField,
    pub h: ScalarField,
    pub delta0: f64,
}

impl DomainProfile {
    /// Profile with `h` defaulting to the midline and `δ₀` inferred.
    pub fn new(g_minus: ScalarField, g_plus: ScalarField, h: Option<ScalarField>) -> DomainProfile {
        let h = h.unwrap_or_else(|| midline(&g_minus, &g_plus));
        let mut p = DomainProfile { g_minus, g_plus, h, delta0: 0.0 };
        p.delta0 = p.separation().0;
        p
    }

    pub fn width(&self, x: f64) -> f64 {
        self.g_plus.eval(x, 0.0) - self.g_minus.eval(x, 0.0)
    }

    /// `max |g±|` on the line sample.
    pub fn max_abs_g(&self) -> f64 {
        linspace(0.0, 1.0, LINE_SAMPLES)
            .into_iter()
            .map(|x| self.g_plus.eval(x, 0.0).abs().max(self.g_minus.eval(x, 0.0).abs()))
            .fold(0.0, f64::max)
    }

    /// `min_x min(h − g⁻, g⁺ − h)` and its location.
    pub fn separation(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for x in linspace(0.0, 1.0, LINE_SAMPLES) {
            let h = self.h.eval(x, 0.0);
            let v = (h - self.g_minus.eval(x, 0.0)).min(self.g_plus.eval(x, 0.0) - h);
            if v < best.0 {
                best = (v, x);
            }
        }
        best
    }

    pub fn check(&self) -> CheckReport {
        let mut worst = (f64::INFINITY, 0.0);
        for x in linspace(0.0, 1.0, LINE_SAMPLES) {
            let v = self.width(x);
            if v <= 0.0 {
                return CheckReport::new("profile", "g_minus < g_plus", false, v, fmt_x(x));
            }
            if v < worst.0 {
                worst = (v, x);
            }
        }
        let (sep, xs) = self.separation();
        if sep < self.delta0 - 1e-12 || sep <= 0.0 {
            return CheckReport::new(
                "profile",
                &format!("g_minus + delta0 <= h <= g_plus - delta0 (delta0={})", self.delta0),
                false,
                sep - self.delta0,
                fmt_x(xs),
            );
        }
        CheckReport::new("profile", "g_minus < h < g_plus with margin delta0", true, sep, fmt_x(xs))
            .with_detail(format!("delta0={}, min width {:.4e} at {}", self.delta0, worst.0, fmt_x(worst.1)))
    }
}

fn midline(gm: &ScalarField, gp: &ScalarField) -> ScalarField {
    let half = |a: &Expr, b: &Expr| {
        Expr::Bin(BinOp::Div, Box::new(Expr::Bin(BinOp::Add, Box::new(a.clone()), Box::new(b.clone()))), Box::new(Expr::Const(2.0)))
    };
    let mut h = ScalarField::new("domain.h", half(&gp.expr, &gm.expr), Domain::Line);
    if let (Some(a), Some(b)) = (&gp.dx, &gm.dx) {
        h.dx = Some(half(a, b));
    }
    h
}

/// Where the expansion slopes came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SlopeSource {
    Config,
    Extracted { residual: f64 },
}

#[derive(Debug, Clone)]
pub struct Slope {
    pub curve: Curve,
    pub source: SlopeSource,
    /// extrapolation residual of the numerical extraction (always computed)
    pub residual: f64,
    pub residual_at: f64,
    /// max |configured − extracted| when both exist
    pub disagreement: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ObliqueData {
    pub gamma1_plus: ScalarField,
    pub gamma1_minus: ScalarField,
    pub beta_plus: ScalarField,
    pub beta_minus: ScalarField,
    pub gamma_o: Curve,
    pub beta_o: Curve,
    pub k_plus: Slope,
    pub k_minus: Slope,
    pub l_plus: Slope,
    pub l_minus: Slope,
}

impl ObliqueData {
    /// Builds traces and slopes; `slopes` are optional configured `k±, l±`.
    pub fn new(
        gamma1_plus: ScalarField,
        gamma1_minus: ScalarField,
        beta_plus: ScalarField,
        beta_minus: ScalarField,
        slopes: [Option<ScalarField>; 4],
    ) -> ObliqueData {
        let [kp, km, lp, lm] = slopes;
        let mk = |f: &ScalarField, given: Option<ScalarField>| -> Slope {
            let (curve, residual, residual_at) = extract_slope(f);
            match given {
                None => Slope { curve, source: SlopeSource::Extracted { residual }, residual, residual_at, disagreement: None },
                Some(g) => {
                    let mut worst = (0.0, 0.0);
                    for x in linspace(0.0, 1.0, 101) {
                        let d = (g.eval(x, 0.0) - curve.eval(x)).abs();
                        if d > worst.0 {
                            worst = (d, x);
                        }
                    }
                    Slope { curve: g.curve(), source: SlopeSource::Config, residual, residual_at, disagreement: Some(worst) }
                }
            }
        };
        ObliqueData {
            gamma_o: gamma1_plus.trace(0.0),
            beta_o: beta_plus.trace(0.0),
            k_plus: mk(&gamma1_plus, kp),
            k_minus: mk(&gamma1_minus, km),
            l_plus: mk(&beta_plus, lp),
            l_minus: mk(&beta_minus, lm),
            gamma1_plus,
            gamma1_minus,
            beta_plus,
            beta_minus,
        }
    }

    /// `β⁺(x,0) = −β⁻(x,0)` and `γ₁⁺(x,0) = −γ₁⁻(x,0)` within [`COMPAT_TOL`].
    pub fn check_compatibility(&self) -> CheckReport {
        let mut worst = (0.0, 0.0, "");
        for x in linspace(0.0, 1.0, LINE_SAMPLES) {
            let db = (self.beta_plus.eval(x, 0.0) + self.beta_minus.eval(x, 0.0)).abs();
            let dg = (self.gamma1_plus.eval(x, 0.0) + self.gamma1_minus.eval(x, 0.0)).abs();
            if db > worst.0 {
                worst = (db, x, "beta_plus(x,0) = -beta_minus(x,0)");
            }
            if dg > worst.0 {
                worst = (dg, x, "gamma1_plus(x,0) = -gamma1_minus(x,0)");
            }
        }
        let pass = worst.0 <= COMPAT_TOL;
        let what = if pass {
            "compatibility beta_plus(x,0) = -beta_minus(x,0), gamma1_plus(x,0) = -gamma1_minus(x,0)".to_string()
        } else {
            format!("compatibility {}", worst.2)
        };
        CheckReport::new("compatibility", &what, pass, worst.0, format!("{} (mismatch {:.3e})", fmt_x(worst.1), worst.0))
    }

    fn fields_and_slopes(&self) -> [(&ScalarField, &Slope, &'static str); 4] {
        [
            (&self.gamma1_plus, &self.k_plus, "gamma1_plus"),
            (&self.gamma1_minus, &self.k_minus, "gamma1_minus"),
            (&self.beta_plus, &self.l_plus, "beta_plus"),
            (&self.beta_minus, &self.l_minus, "beta_minus"),
        ]
    }

    /// First-order y-expansion of every oblique field around its own trace.
    pub fn check_expansion(&self) -> CheckReport {
        let xs = linspace(0.0, 1.0, 101);
        let mut worst_value: f64 = 0.0;
        for (f, s, name) in self.fields_and_slopes() {
            if s.residual > EXTRACTION_RESIDUAL {
                return CheckReport::new(
                    "expansion",
                    &format!("y-expansion of {} (extrapolation residual <= {:e})", name, EXTRACTION_RESIDUAL),
                    false,
                    s.residual,
                    fmt_x(s.residual_at),
                );
            }
            if let Some((d, x)) = s.disagreement {
                if d > SLOPE_AGREEMENT {
                    return CheckReport::new(
                        "expansion",
                        &format!("configured slope for {} agrees with extracted slope", name),
                        false,
                        d,
                        fmt_x(x),
                    );
                }
            }
            let ratio = |y: f64| -> (f64, f64) {
                let mut w = (0.0, 0.0);
                for &x in &xs {
                    let r = (f.eval(x, y) - f.eval(x, 0.0) - s.curve.eval(x) * y).abs() / y.abs();
                    if r > w.0 {
                        w = (r, x);
                    }
                }
                w
            };
            let at = |h: f64| {
                let (a, b) = (ratio(h), ratio(-h));
                if a.0 >= b.0 {
                    a
                } else {
                    b
                }
            };
            let (r1, r2, r3) = (at(0.1), at(0.01), at(0.001));
            worst_value = worst_value.max(r3.0);
            if r3.0 > 1e-6 + 0.1 * r1.0 || r3.0 > 1e-6 + r2.0 {
                return CheckReport::new(
                    "expansion",
                    &format!("y-expansion of {} (remainder o(|y|))", name),
                    false,
                    r3.0,
                    format!("{} (remainder/|y| = {:.3e}, {:.3e}, {:.3e} at |y| = 0.1, 0.01, 0.001)", fmt_x(r3.1), r1.0, r2.0, r3.0),
                );
            }
        }
        CheckReport::new("expansion", "y-expansion of gamma1, beta with slopes k, l", true, worst_value, "")
    }
}

#[derive(Debug, Clone)]
pub enum LateralBC {
    Neumann,
    Oblique { gamma1: ScalarField, gamma2: ScalarField, beta: ScalarField },
    Dirichlet { beta: ScalarField },
}

impl LateralBC {
    pub fn kind(&self) -> &'static str {
        match self {
            LateralBC::Neumann => "neumann",
            LateralBC::Oblique { .. } => "oblique",
            LateralBC::Dirichlet { .. } => "dirichlet",
        }
    }

    /// `γ₁ν > 0` at both endpoints for all sampled y, and `γ₂(x,0) = 0`.
    pub fn check_obliqueness(&self) -> CheckReport {
        let name = "lateral_obliqueness";
        let what = "gamma1 nu > 0 at x in {0,1} and gamma2(x,0) = 0";
        let LateralBC::Oblique { gamma1, gamma2, .. } = self else {
            return CheckReport::skipped(name, what, &format!("{} lateral condition", self.kind()));
        };
        let mut worst = (f64::INFINITY, String::new());
        for (x, nu) in [(0.0, -1.0), (1.0, 1.0)] {
            for y in linspace(-1.0, 1.0, operators::STRIP_SAMPLES) {
                let v = gamma1.eval(x, y) * nu;
                if v < worst.0 {
                    worst = (v, fmt_xy(x, y));
                }
            }
            let g2 = gamma2.eval(x, 0.0).abs();
            if g2 > COMPAT_TOL {
                return CheckReport::new(name, "gamma2(x,0) = 0 at the lateral boundary", false, -g2, fmt_xy(x, 0.0));
            }
        }
        CheckReport::new(name, what, worst.0 > 0.0, worst.0, worst.1)
    }

    /// Endpoint datum of the limit problem: slope `β/γ₁` at y=0 for oblique,
    /// value for Dirichlet.
    pub fn fields(&self) -> Vec<&ScalarField> {
        match self {
            LateralBC::Neumann => vec![],
            LateralBC::Oblique { gamma1, gamma2, beta } => vec![gamma1, gamma2, beta],
            LateralBC::Dirichlet { beta } => vec![beta],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerRule {
    PreferTopBottom,
    PreferLateral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Policy,
    Damped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub nx: usize,
    pub nt: usize,
    pub nx_limit: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Option<f64>,
    pub corner_rule: CornerRule,
    pub method: Method,
    pub samples: usize,
    pub seed: u64,
    pub eps: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            nx: 201,
            nt: 41,
            nx_limit: 201,
            tol: 1e-9,
            max_iter: 100,
            damping: None,
            corner_rule: CornerRule::PreferTopBottom,
            method: Method::Policy,
            samples: 1000,
            seed: 42,
            eps: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub profile: DomainProfile,
    pub oblique: ObliqueData,
    pub lateral: LateralBC,
    pub operator: BellmanIsaacsOperator,
    pub solver: SolverSettings,
    pub config: ProblemConfig,
}

/// Parses and fully validates a problem description.
pub fn parse_problem(config_text: &str) -> Result<ProblemInstance> {
    let cfg = ProblemConfig::parse(config_text)?;
    ProblemInstance::from_config(cfg, true)
}

fn field_from(cfg: &ProblemConfig, key: &str, domain: Domain, default: Option<&str>) -> Result<ScalarField> {
    let src = match (cfg.get(key), default) {
        (Some(v), _) => v,
        (None, Some(d)) => d,
        (None, None) => return Err(Error::Config(format!("missing required key '{}'", key))),
    };
    let mut f = ScalarField::parse(key, src, domain).map_err(|e| Error::Config(format!("{}: {}", key, e)))?;
    let deriv = |suffix: &str| -> Result<Option<Expr>> {
        match cfg.get(&format!("{}.{}", key, suffix)) {
            Some(s) => Ok(Some(Expr::parse(s).map_err(|e| Error::Config(format!("{}.{}: {}", key, suffix, e)))?)),
            None => Ok(None),
        }
    };
    f.dx = deriv("dx")?;
    f.dy = deriv("dy")?;
    Ok(f)
}

fn num(cfg: &ProblemConfig, key: &str) -> Option<f64> {
    cfg.get(key).and_then(|v| v.parse().ok())
}

fn int(cfg: &ProblemConfig, key: &str, default: usize) -> usize {
    cfg.get(key).and_then(|v| v.parse().ok()).unwrap_or(default)
}

fn split_exprs(src: &str) -> Vec<String> {
    config::split_top(src, ',').into_iter().map(|(_, s)| s.trim().to_string()).collect()
}

fn build_operator(cfg: &ProblemConfig) -> Result<BellmanIsaacsOperator> {
    let labels = cfg.family_labels();
    if labels.is_empty() {
        return Err(Error::Config("no operator families declared (operator.family.<l>.<m>.sigma)".into()));
    }
    let mut lambdas: Vec<String> = labels.iter().map(|(l, _)| l.clone()).collect();
    lambdas.dedup();
    let mut mus: Vec<String> = labels.iter().map(|(_, m)| m.clone()).collect();
    mus.sort();
    mus.dedup();
    let strip = |key: &str, src: &str| {
        ScalarField::parse(key, src, Domain::Strip).map_err(|e| Error::Config(format!("{}: {}", key, e)))
    };
    let mut families = Vec::with_capacity(lambdas.len());
    for l in &lambdas {
        let mut row = Vec::with_capacity(mus.len());
        for m in &mus {
            let base = format!("operator.family.{}.{}", l, m);
            let sigma_src = cfg.get(&format!("{}.sigma", base)).ok_or_else(|| {
                Error::Config(format!(
                    "family {}.{} is missing '{}.sigma' (index sets must form a full grid)",
                    l, m, base
                ))
            })?;
            let mut sigma = Vec::new();
            for (_, row_src) in config::split_top(sigma_src, ';') {
                let e = split_exprs(row_src);
                sigma.push([strip(&format!("{}.sigma", base), &e[0])?, strip(&format!("{}.sigma", base), &e[1])?]);
            }
            let drift_src = cfg.get(&format!("{}.drift", base)).unwrap_or("0, 0");
            let d = split_exprs(drift_src);
            let c_src = cfg
                .get(&format!("{}.c", base))
                .ok_or_else(|| Error::Config(format!("missing required key '{}.c'", base)))?;
            row.push(CoefficientFamily {
                sigma,
                drift: [strip(&format!("{}.drift", base), &d[0])?, strip(&format!("{}.drift", base), &d[1])?],
                c: strip(&format!("{}.c", base), c_src)?,
                f: strip(&format!("{}.f", base), cfg.get(&format!("{}.f", base)).unwrap_or("0"))?,
            });
        }
        families.push(row);
    }
    let alpha = num(cfg, "operator.alpha").ok_or_else(|| Error::Config("missing required key 'operator.alpha'".into()))?;
    let c_f = num(cfg, "operator.c_f").ok_or_else(|| Error::Config("missing required key 'operator.c_f'".into()))?;
    if alpha <= 0.0 || c_f <= 0.0 {
        return Err(Error::Config("operator.alpha and operator.c_f must be positive".into()));
    }
    Ok(BellmanIsaacsOperator { lambdas, mus, families, alpha, c_f })
}

fn build_solver(cfg: &ProblemConfig) -> Result<SolverSettings> {
    let d = SolverSettings::default();
    let nx = int(cfg, "solver.nx", d.nx);
    let s = SolverSettings {
        nx,
        nt: int(cfg, "solver.nt", d.nt),
        nx_limit: int(cfg, "solver.nx_limit", nx),
        tol: num(cfg, "solver.tol").unwrap_or(d.tol),
        max_iter: int(cfg, "solver.max_iter", d.max_iter),
        damping: num(cfg, "solver.damping"),
        corner_rule: match cfg.get("solver.corner_rule") {
            Some("prefer_lateral") => CornerRule::PreferLateral,
            _ => CornerRule::PreferTopBottom,
        },
        method: match cfg.get("solver.method") {
            Some("damped") => Method::Damped,
            _ => Method::Policy,
        },
        samples: int(cfg, "solver.samples", d.samples),
        seed: int(cfg, "solver.seed", d.seed as usize) as u64,
        eps: num(cfg, "solver.eps").unwrap_or(d.eps),
    };
    if s.nx < 3 || s.nt < 3 || s.nx_limit < 3 {
        return Err(Error::Config("solver.nx, solver.nt and solver.nx_limit must be at least 3".into()));
    }
    if !(s.tol > 0.0) || !(s.eps > 0.0) {
        return Err(Error::Config("solver.tol and solver.eps must be positive".into()));
    }
    if let Some(t) = s.damping {
        if !(t > 0.0) {
            return Err(Error::Config("solver.damping must be positive".into()));
        }
    }
    Ok(s)
}

impl ProblemInstance {
    pub fn from_file(path: impl AsRef<Path>, strict: bool) -> Result<ProblemInstance> {
        let text = std::fs::read_to_string(path)?;
        ProblemInstance::from_config(ProblemConfig::parse(&text)?, strict)
    }

    /// Builds the typed instance. With `strict`, every sampled invariant is
    /// enforced; otherwise only the structure is, and [`crate::harness::checks`]
    /// reports the rest.
    pub fn from_config(cfg: ProblemConfig, strict: bool) -> Result<ProblemInstance> {
        let g_minus = field_from(&cfg, "domain.g_minus", Domain::Line, None)?;
        let g_plus = field_from(&cfg, "domain.g_plus", Domain::Line, None)?;
        let h = if cfg.get("domain.h").is_some() { Some(field_from(&cfg, "domain.h", Domain::Line, None)?) } else { None };
        let mut profile = DomainProfile::new(g_minus, g_plus, h);
        if let Some(d) = num(&cfg, "domain.delta0") {
            profile.delta0 = d;
        }

        let strip = |k: &str| field_from(&cfg, k, Domain::Strip, Some("0"));
        let slope = |k: &str| -> Result<Option<ScalarField>> {
            if cfg.get(k).is_some() {
                Ok(Some(field_from(&cfg, k, Domain::Line, None)?))
            } else {
                Ok(None)
            }
        };
        let oblique = ObliqueData::new(
            strip("oblique.gamma1_plus")?,
            strip("oblique.gamma1_minus")?,
            strip("oblique.beta_plus")?,
            strip("oblique.beta_minus")?,
            [slope("oblique.k_plus")?, slope("oblique.k_minus")?, slope("oblique.l_plus")?, slope("oblique.l_minus")?],
        );

        let lateral = match cfg.get("lateral.kind").unwrap_or("neumann") {
            "oblique" => LateralBC::Oblique {
                gamma1: field_from(&cfg, "lateral.gamma1", Domain::Strip, None)?,
                gamma2: field_from(&cfg, "lateral.gamma2", Domain::Strip, Some("0"))?,
                beta: field_from(&cfg, "lateral.beta", Domain::Strip, Some("0"))?,
            },
            "dirichlet" => LateralBC::Dirichlet { beta: field_from(&cfg, "lateral.beta", Domain::Strip, None)? },
            _ => LateralBC::Neumann,
        };

        let inst = ProblemInstance {
            profile,
            oblique,
            lateral,
            operator: build_operator(&cfg)?,
            solver: build_solver(&cfg)?,
            config: cfg,
        };
        if strict {
            inst.validate()?;
        }
        Ok(inst)
    }

    pub fn all_fields(&self) -> Vec<&ScalarField> {
        let mut v = vec![&self.profile.g_minus, &self.profile.g_plus, &self.profile.h];
        let o = &self.oblique;
        v.extend([&o.gamma1_plus, &o.gamma1_minus, &o.beta_plus, &o.beta_minus]);
        v.extend(self.lateral.fields());
        for (_, _, fam) in self.operator.iter_families() {
            v.extend(fam.fields());
        }
        v
    }

    /// Finite values on the declared domain and derivative expressions
    /// matching finite differences.
    pub fn check_fields(&self) -> CheckReport {
        let line = linspace(0.0, 1.0, LINE_SAMPLES);
        let sx = linspace(0.0, 1.0, operators::STRIP_SAMPLES);
        let sy = linspace(-1.0, 1.0, operators::STRIP_SAMPLES);
        for f in self.all_fields() {
            let exprs = [Some(&f.expr), f.dx.as_ref(), f.dy.as_ref()];
            for e in exprs.into_iter().flatten() {
                let bad = match f.domain {
                    Domain::Line => line.iter().find(|&&x| !e.eval(x, 0.0).is_finite()).map(|&x| fmt_x(x)),
                    Domain::Strip => sx
                        .iter()
                        .flat_map(|&x| sy.iter().map(move |&y| (x, y)))
                        .find(|&(x, y)| !e.eval(x, y).is_finite())
                        .map(|(x, y)| fmt_xy(x, y)),
                };
                if let Some(w) = bad {
                    return CheckReport::new("fields", &format!("{} evaluable (finite)", f.key), false, f64::NAN, w);
                }
            }
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let y = match f.domain {
                    Domain::Line => 0.0,
                    Domain::Strip => -0.9 + 1.8 * ((i * 37) % 101) as f64 / 100.0,
                };
                if let Some(dx) = &f.dx {
                    let num = fd::d1(|s| f.eval(s, y), x, 0.0, 1.0);
                    let err = (dx.eval(x, y) - num).abs();
                    if err > 1e-6 * num.abs().max(1.0) {
                        return CheckReport::new("fields", &format!("{}.dx matches finite differences", f.key), false, err, fmt_xy(x, y));
                    }
                }
                if let Some(dy) = &f.dy {
                    let num = fd::d1(|s| f.eval(x, s), y, -1.0, 1.0);
                    let err = (dy.eval(x, y) - num).abs();
                    if err > 1e-6 * num.abs().max(1.0) {
                        return CheckReport::new("fields", &format!("{}.dy matches finite differences", f.key), false, err, fmt_xy(x, y));
                    }
                }
            }
        }
        CheckReport::new("fields", "all fields finite, derivative expressions consistent", true, 0.0, "")
    }

    /// Enforces every sampled type invariant, first failure wins.
    pub fn validate(&self) -> Result<()> {
        self.check_fields().into_result()?;
        self.profile.check().into_result()?;
        self.oblique.check_compatibility().into_result()?;
        self.oblique.check_expansion().into_result()?;
        self.lateral.check_obliqueness().into_result()?;
        operators::check_positivity(&self.operator).into_result()?;
        operators::check_uniform_bounds(&self.operator).into_result()?;
        Ok(())
    }

    /// Largest ε accepted by the top/bottom obliqueness and containment checks.
    pub fn eps_threshold(&self) -> f64 {
        geometry::obliqueness_threshold(&self.profile, &self.oblique)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[domain]\ng_plus = 1\ng_minus = 0\nh = 0.5\n[operator]\nalpha = 1\nc_f = 2\nfamily.0.sigma = 1, 0; 0, 1\nfamily.0.c = 1\nfamily.0.f = 1\n";

    #[test]
    fn constant_profile_infers_delta0() {
        let p = parse_problem(BASE).unwrap();
        assert_eq!(p.profile.delta0, 0.5);
        assert_eq!(p.lateral.kind(), "neumann");
    }

    #[test]
    fn equal_profiles_rejected_at_zero() {
        let text = BASE.replace("g_plus = 1\ng_minus = 0\nh = 0.5", "g_plus = x\ng_minus = x");
        let err = parse_problem(&text).unwrap_err().to_string();
        assert_eq!(err, "g_minus < g_plus violated at x=0");
    }

    #[test]
    fn incompatible_beta_rejected() {
        let text = format!("{}[oblique]\nbeta_plus = 1\nbeta_minus = 0\n", BASE);
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.starts_with("compatibility beta_plus(x,0) = -beta_minus(x,0) violated at x="), "{}", err);
    }

    #[test]
    fn bad_derivative_rejected() {
        let text = BASE.replace("g_plus = 1", "g_plus = 1 + x^2\ng_plus.dx = x");
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("domain.g_plus.dx matches finite differences"), "{}", err);
    }

    #[test]
    fn unevaluable_field_rejected() {
        let text = BASE.replace("family.0.f = 1", "family.0.f = 1/x");
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("evaluable"), "{}", err);
    }

    #[test]
    fn nonsmooth_gamma_rejected() {
        let text = format!("{}[oblique]\ngamma1_plus = abs(y)\ngamma1_minus = -abs(y)\n", BASE);
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("y-expansion of gamma1_plus"), "{}", err);
    }

    #[test]
    fn slope_disagreement_rejected() {
        let text = format!("{}[oblique]\ngamma1_plus = x + 2*y\ngamma1_minus = -x\nk_plus = 1\n", BASE);
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("configured slope for gamma1_plus"), "{}", err);
    }

    #[test]
    fn missing_family_member() {
        let text = format!("{}family.1.1.sigma = 1, 0; 0, 1\nfamily.1.1.c = 1\n", BASE);
        assert!(matches!(parse_problem(&text), Err(Error::Config(_))));
    }
}
