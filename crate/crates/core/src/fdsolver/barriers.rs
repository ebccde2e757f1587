//! Explicit strict super- and subsolutions of the thin problem and the
//! sandwich test for computed solutions.

use serde::Serialize;

use crate::check::fmt_xy;
use crate::error::{Error, Result};
use crate::fdsolver::grid::GridFunction;
use crate::fdsolver::SchemeConfig;
use crate::field::Curve;
use crate::operators::{eval_frozen, Mat2};
use crate::problem::geometry::ThinGrid;
use crate::problem::{LateralBC, ProblemInstance};

const MAX_ROUNDS: usize = 60;

#[derive(Debug, Clone, Serialize)]
pub struct Barriers {
    pub psi_upper: GridFunction,
    pub psi_lower: GridFunction,
    pub m: f64,
    pub lambda: f64,
    pub k: f64,
    /// `max |F(ψ)|` over the nodes, for both barriers
    pub c3: f64,
    /// smallest strict boundary margin of the final `(K, Λ)`
    pub boundary_margin: f64,
}

struct Profile<'a> {
    inst: &'a ProblemInstance,
    eps: f64,
    k: f64,
    lambda: f64,
    quadratic: bool,
    h: Curve,
}

/// Value, gradient and Hessian of `ψ_s` at a point.
struct Jet {
    v: f64,
    grad: [f64; 2],
    hess: Mat2,
}

impl Profile<'_> {
    fn rho(&self, x: f64) -> [f64; 3] {
        if self.quadratic {
            [self.k * (x - 0.5).powi(2), 2.0 * self.k * (x - 0.5), 2.0 * self.k]
        } else {
            [self.k, 0.0, 0.0]
        }
    }

    /// `ψ_s = sρ + v_s y + s(Λ/2)(y−εh)²` with `v_s = β_o − sγ_oρ′`.
    fn jet(&self, s: f64, x: f64, y: f64) -> Jet {
        let o = &self.inst.oblique;
        let (eps, lam) = (self.eps, self.lambda);
        let [r, r1, r2] = self.rho(x);
        let (g, g1, g2) = (o.gamma_o.eval(x), o.gamma_o.d1(x), o.gamma_o.d2(x));
        let (b, b1, b2) = (o.beta_o.eval(x), o.beta_o.d1(x), o.beta_o.d2(x));
        let (h, h1, h2) = (self.h.eval(x), self.h.d1(x), self.h.d2(x));
        let v = b - s * g * r1;
        let v1 = b1 - s * (g1 * r1 + g * r2);
        let v2 = b2 - s * (g2 * r1 + 2.0 * g1 * r2);
        let d = y - eps * h;
        Jet {
            v: s * r + v * y + s * 0.5 * lam * d * d,
            grad: [s * r1 + y * v1 - s * lam * eps * d * h1, v + s * lam * d],
            hess: [
                [s * r2 + y * v2 + s * lam * (eps * eps * h1 * h1 - eps * d * h2), v1 - s * lam * eps * h1],
                [v1 - s * lam * eps * h1, s * lam],
            ],
        }
    }

    /// Smallest strict margins `(lateral, top/bottom)` over the boundary
    /// nodes, for both barriers, with the witness of the overall worst.
    fn margins(&self, grid: &ThinGrid) -> (f64, f64, String) {
        let o = &self.inst.oblique;
        let (nx, nt) = (grid.nx, grid.nt);
        let mut lat = (f64::INFINITY, String::new());
        let mut tb = (f64::INFINITY, String::new());
        for s in [1.0, -1.0] {
            for i in 0..nx {
                for (j, sign) in [(nt - 1, 1.0), (0, -1.0)] {
                    let (x, y) = (grid.xs[i], grid.y(i, j));
                    let jt = self.jet(s, x, y);
                    let (gamma, beta) = if sign > 0.0 {
                        (o.gamma1_plus.eval(x, y), o.beta_plus.eval(x, y))
                    } else {
                        (o.gamma1_minus.eval(x, y), o.beta_minus.eval(x, y))
                    };
                    let m = s * (gamma * jt.grad[0] + sign * jt.grad[1] - beta);
                    if m < tb.0 {
                        tb = (m, fmt_xy(x, y));
                    }
                }
            }
            for (i, nu) in [(0, -1.0), (nx - 1, 1.0)] {
                for j in 0..nt {
                    let (x, y) = (grid.xs[i], grid.y(i, j));
                    let jt = self.jet(s, x, y);
                    let m = s * match &self.inst.lateral {
                        LateralBC::Neumann => nu * jt.grad[0],
                        LateralBC::Oblique { gamma1, gamma2, beta } => {
                            gamma1.eval(x, y) * jt.grad[0] + gamma2.eval(x, y) * jt.grad[1] - beta.eval(x, y)
                        }
                        LateralBC::Dirichlet { beta } => jt.v - beta.eval(x, y),
                    };
                    if m < lat.0 {
                        lat = (m, fmt_xy(x, y));
                    }
                }
            }
        }
        let w = if lat.0 < tb.0 { lat.1 } else { tb.1 };
        (lat.0, tb.0, w)
    }
}

/// Builds `ψ̄_ε`, `ψ̲_ε` on the fitted grid: `ρ = K(x−½)²` for Neumann or
/// oblique lateral data, `ρ = K` for Dirichlet; `K` and `Λ` are doubled
/// until every boundary inequality is strict. With `m_auto`, `M` is chosen
/// so that `αM > max |F(ψ)|`.
pub fn build_barriers(inst: &ProblemInstance, eps: f64, cfg: &SchemeConfig, m_auto: bool) -> Result<Barriers> {
    let compat = inst.oblique.check_compatibility();
    if !compat.pass {
        return Err(Error::invariant("compatibility required", compat.witness));
    }
    let grid = ThinGrid::new(&inst.profile, eps, cfg.nx, cfg.nt);
    let mut p = Profile {
        inst,
        eps,
        k: 1.0,
        lambda: 1.0 / inst.profile.delta0,
        quadratic: !matches!(inst.lateral, LateralBC::Dirichlet { .. }),
        h: inst.profile.h.curve(),
    };
    let mut rounds = 0;
    let margin = loop {
        let (lat, tb, witness) = p.margins(&grid);
        if lat > 0.0 && tb > 0.0 {
            break lat.min(tb);
        }
        rounds += 1;
        if rounds > MAX_ROUNDS {
            return Err(Error::invariant(
                format!("strict barrier boundary inequalities within {} doublings of K and Lambda", MAX_ROUNDS),
                witness,
            ));
        }
        if lat <= 0.0 {
            p.k *= 2.0;
        }
        if tb <= 0.0 {
            p.lambda *= 2.0;
        }
    };
    let n = grid.len();
    let mut up = Vec::with_capacity(n);
    let mut lo = Vec::with_capacity(n);
    let mut c3: f64 = 0.0;
    for k in 0..n {
        let (x, y) = grid.point(k);
        let co = inst.operator.coefficients_at(x, y);
        for (s, out) in [(1.0, &mut up), (-1.0, &mut lo)] {
            let jt = p.jet(s, x, y);
            c3 = c3.max(eval_frozen(&co, &jt.hess, &jt.grad, jt.v).abs());
            out.push(jt.v);
        }
    }
    let m = if m_auto { 1.5 * c3 / inst.operator.alpha + 1e-12 } else { 0.0 };
    Ok(Barriers {
        psi_upper: GridFunction::on_thin(&grid, up),
        psi_lower: GridFunction::on_thin(&grid, lo),
        m,
        lambda: p.lambda,
        k: p.k,
        c3,
        boundary_margin: margin,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    /// `min (ψ̄ + M − u)`
    pub upper_margin: f64,
    pub upper_at: String,
    /// `min (u − ψ̲ + M)`
    pub lower_margin: f64,
    pub lower_at: String,
    pub pass: bool,
}

impl SandwichReport {
    pub fn margin(&self) -> f64 {
        self.upper_margin.min(self.lower_margin)
    }
}

pub fn check_barrier_sandwich(u: &GridFunction, bars: &Barriers, tol: f64) -> Result<SandwichReport> {
    if u.len() != bars.psi_upper.len() || u.nt != bars.psi_upper.nt {
        return Err(Error::Config(format!(
            "barrier grid has {} nodes, solution has {}",
            bars.psi_upper.len(),
            u.len()
        )));
    }
    let mut up = (f64::INFINITY, 0);
    let mut lo = (f64::INFINITY, 0);
    for k in 0..u.len() {
        let a = bars.psi_upper.values[k] + bars.m - u.values[k];
        let b = u.values[k] - bars.psi_lower.values[k] + bars.m;
        if a < up.0 {
            up = (a, k);
        }
        if b < lo.0 {
            lo = (b, k);
        }
    }
    let at = |k: usize| fmt_xy(u.points[k].0, u.points[k].1);
    Ok(SandwichReport {
        upper_margin: up.0,
        upper_at: at(up.1),
        lower_margin: lo.0,
        lower_at: at(lo.1),
        pass: up.0 >= -tol && lo.0 >= -tol,
    })
}
