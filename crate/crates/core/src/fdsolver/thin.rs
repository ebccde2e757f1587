//! Monotone scheme for the thin problem on the fitted grid.

use crate::check::fmt_xy;
use crate::error::{Error, Result};
use crate::fdsolver::scheme::{BoundaryOp, DiscreteScheme, Layout, LinRow, NodeRows};
use crate::fdsolver::SchemeConfig;
use crate::field::{fd, ScalarField};
use crate::operators::inf_sup;
use crate::problem::geometry::{check_obliqueness_tb, obliqueness_threshold, ThinGrid};
use crate::problem::{CornerRule, LateralBC, ProblemInstance};

/// `coef · ∂u` by a first-order difference that keeps the row monotone:
/// backward for `coef > 0`, forward for `coef < 0`. A missing neighbor drops
/// the term.
fn one_sided(row: &mut LinRow, coef: f64, h: f64, back: Option<usize>, fwd: Option<usize>) {
    if coef > 0.0 {
        if let Some(k) = back {
            row.couple(k, coef / h);
        }
    } else if coef < 0.0 {
        if let Some(k) = fwd {
            row.couple(k, -coef / h);
        }
    }
}

/// Hybrid first derivative: centered when both weights stay nonnegative,
/// upwind otherwise. Returns the increments for the (forward, backward)
/// neighbors.
pub(crate) fn drift_weights(b: f64, h: f64, w_fwd: f64, w_back: f64) -> (f64, f64) {
    let half = b / (2.0 * h);
    if w_fwd + half >= 0.0 && w_back - half >= 0.0 {
        (half, -half)
    } else if b > 0.0 {
        (b / h, 0.0)
    } else {
        (0.0, -b / h)
    }
}

pub fn discretize_thin(inst: &ProblemInstance, eps: f64, cfg: &SchemeConfig) -> Result<DiscreteScheme> {
    discretize_thin_with(inst, eps, cfg, None)
}

/// As [`discretize_thin`]; with `exact`, every family source is shifted by
/// `F(exact)` and every boundary row imposes the boundary operator applied
/// to `exact`.
pub fn discretize_thin_with(
    inst: &ProblemInstance,
    eps: f64,
    cfg: &SchemeConfig,
    exact: Option<&ScalarField>,
) -> Result<DiscreteScheme> {
    if cfg.nx < 3 || cfg.nt < 3 {
        return Err(Error::Config(format!("thin grid needs nx, nt >= 3 (got {}, {})", cfg.nx, cfg.nt)));
    }
    let obl = check_obliqueness_tb(&inst.profile, &inst.oblique, eps);
    if !obl.pass {
        return Err(obl.to_check(obliqueness_threshold(&inst.profile, &inst.oblique)).into_result().unwrap_err());
    }
    let grid = ThinGrid::new(&inst.profile, eps, cfg.nx, cfg.nt);
    let (nx, nt) = (cfg.nx, cfg.nt);
    let (hx, ht) = (grid.hx(), grid.ht());
    let op = &inst.operator;
    let data = &inst.oblique;
    let mut rows = Vec::with_capacity(grid.len());
    let mut points = Vec::with_capacity(grid.len());
    for i in 0..nx {
        for j in 0..nt {
            let (x, y) = (grid.xs[i], grid.y(i, j));
            points.push((x, y));
            let m = grid.metric(i, j);
            let at = |di: isize, dj: isize| -> Option<usize> {
                let (a, b) = (i as isize + di, j as isize + dj);
                (a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < nt).then(|| grid.idx(a as usize, b as usize))
            };
            let lateral = i == 0 || i == nx - 1;
            let top_bottom = j == 0 || j == nt - 1;
            let node = if top_bottom && (!lateral || cfg.corner_rule == CornerRule::PreferTopBottom) {
                let mut row = LinRow::new();
                let (gamma, beta, sign) = if j == nt - 1 {
                    (data.gamma1_plus.eval(x, y), data.beta_plus.eval(x, y), 1.0)
                } else {
                    (data.gamma1_minus.eval(x, y), data.beta_minus.eval(x, y), -1.0)
                };
                one_sided(&mut row, gamma, hx, at(-1, 0), at(1, 0));
                one_sided(&mut row, gamma * m.tx + sign * m.ty, ht, at(0, -1), at(0, 1));
                row.rhs = beta;
                NodeRows::Boundary { row, op: BoundaryOp { px: gamma, py: sign, pv: 0.0 } }
            } else if lateral {
                let nu = if i == 0 { -1.0 } else { 1.0 };
                let mut row = LinRow::new();
                let op = match &inst.lateral {
                    LateralBC::Neumann => {
                        one_sided(&mut row, nu, hx, at(-1, 0), at(1, 0));
                        one_sided(&mut row, nu * m.tx, ht, at(0, -1), at(0, 1));
                        BoundaryOp { px: nu, py: 0.0, pv: 0.0 }
                    }
                    LateralBC::Oblique { gamma1, gamma2, beta } => {
                        let (g1, g2) = (gamma1.eval(x, y), gamma2.eval(x, y));
                        one_sided(&mut row, g1, hx, at(-1, 0), at(1, 0));
                        one_sided(&mut row, g1 * m.tx + g2 * m.ty, ht, at(0, -1), at(0, 1));
                        row.rhs = beta.eval(x, y);
                        BoundaryOp { px: g1, py: g2, pv: 0.0 }
                    }
                    LateralBC::Dirichlet { beta } => {
                        row.diag = 1.0;
                        row.rhs = beta.eval(x, y);
                        BoundaryOp { px: 0.0, py: 0.0, pv: 1.0 }
                    }
                };
                NodeRows::Boundary { row, op }
            } else {
                let mut fams = Vec::with_capacity(op.n_lambda());
                for fl in &op.families {
                    let mut r = Vec::with_capacity(fl.len());
                    for fam in fl {
                        let c = fam.at(x, y);
                        let a = &c.a;
                        let axx = a[0][0];
                        let axt = a[0][0] * m.tx + a[0][1] * m.ty;
                        let att = a[0][0] * m.tx * m.tx + 2.0 * a[0][1] * m.tx * m.ty + a[1][1] * m.ty * m.ty;
                        let bx = c.b[0];
                        let bt = c.b[0] * m.tx + c.b[1] * m.ty + a[0][0] * m.txx + 2.0 * a[0][1] * m.txy;
                        let mx = axt.abs() / (hx * ht);
                        let tiny = 1e-12 * (axx / (hx * hx) + att / (ht * ht));
                        let mut wx = axx / (hx * hx) - mx;
                        let mut wt = att / (ht * ht) - mx;
                        if wx < -tiny {
                            return Err(Error::Monotonicity {
                                i,
                                j,
                                reason: format!(
                                    "cross term |A_xt|/(hx ht) = {:.6e} exceeds A_xx/hx^2 = {:.6e} at {}",
                                    mx,
                                    axx / (hx * hx),
                                    fmt_xy(x, y)
                                ),
                            });
                        }
                        if wt < -tiny {
                            return Err(Error::Monotonicity {
                                i,
                                j,
                                reason: format!(
                                    "cross term |A_xt|/(hx ht) = {:.6e} exceeds A_tt/ht^2 = {:.6e} at {}",
                                    mx,
                                    att / (ht * ht),
                                    fmt_xy(x, y)
                                ),
                            });
                        }
                        wx = wx.max(0.0);
                        wt = wt.max(0.0);
                        let (ex, wwx) = drift_weights(bx, hx, wx, wx);
                        let (nt_, st) = drift_weights(bt, ht, wt, wt);
                        let mut row = LinRow::new();
                        row.couple(at(1, 0).unwrap(), wx + ex);
                        row.couple(at(-1, 0).unwrap(), wx + wwx);
                        row.couple(at(0, 1).unwrap(), wt + nt_);
                        row.couple(at(0, -1).unwrap(), wt + st);
                        if axt >= 0.0 {
                            row.couple(at(1, 1).unwrap(), mx);
                            row.couple(at(-1, -1).unwrap(), mx);
                        } else {
                            row.couple(at(-1, 1).unwrap(), mx);
                            row.couple(at(1, -1).unwrap(), mx);
                        }
                        row.diag += c.c;
                        row.rhs = c.f;
                        r.push(row);
                    }
                    fams.push(r);
                }
                NodeRows::Families(fams)
            };
            rows.push(node);
        }
    }
    let mut scheme = DiscreteScheme::new(Layout::Thin { nx, nt, eps }, points, rows, nt + 1);
    if let Some(w) = exact {
        let f = |x: f64, y: f64| w.eval(x, y);
        scheme.shift_rhs(|x, y, bop| {
            let [u, ux, uy, uxx, uxy, uyy] = fd::jet(f, x, y);
            match bop {
                Some(b) => b.apply(u, ux, uy),
                None => {
                    let co = op.coefficients_at(x, y);
                    let hess = [[uxx, uxy], [uxy, uyy]];
                    inf_sup(co.len(), co[0].len(), |l, m| co[l][m].apply(&hess, &[ux, uy], u)).0
                }
            }
        });
    }
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::config::ProblemConfig;

    fn inst(text: &str) -> ProblemInstance {
        ProblemInstance::from_config(ProblemConfig::parse(text).unwrap(), false).unwrap()
    }

    fn cfg(nx: usize, nt: usize) -> SchemeConfig {
        SchemeConfig { nx, nt, ..SchemeConfig::default() }
    }

    const FLAT: &str = "[domain]\ng_plus = 1\ng_minus = -1\n[oblique]\ngamma1_plus = 0\ngamma1_minus = 0\n\
        beta_plus = 0\nbeta_minus = 0\n[operator]\nalpha = 1\nc_f = 2\nfamily.0.sigma = 0, 1\nfamily.0.c = 1\nfamily.0.f = 1\n";

    #[test]
    fn y_laplacian_is_three_point() {
        let eps = 0.1;
        let s = discretize_thin(&inst(FLAT), eps, &cfg(7, 9)).unwrap();
        let ht = 1.0 / 8.0;
        let w = 1.0 / (2.0 * eps * ht).powi(2);
        for i in 1..6 {
            for j in 1..8 {
                let k = i * 9 + j;
                let NodeRows::Families(f) = &s.rows[k] else { panic!("interior row expected") };
                let row = &f[0][0];
                let mut nbrs = row.nbrs.clone();
                nbrs.sort_by_key(|e| e.0);
                assert_eq!(nbrs.len(), 2);
                assert_eq!((nbrs[0].0, nbrs[1].0), (k - 1, k + 1));
                assert!((nbrs[0].1 - w).abs() <= 1e-12 * w && (nbrs[1].1 - w).abs() <= 1e-12 * w);
                assert!((row.diag - 2.0 * w - 1.0).abs() <= 1e-12 * w);
            }
        }
    }

    #[test]
    fn mixed_moment_matches_chain_rule() {
        let text = "[domain]\ng_plus = 1 + x/2\ng_plus.dx = 0.5\ng_minus = -1\n[oblique]\ngamma1_plus = 0\ngamma1_minus = 0\n\
            beta_plus = 0\nbeta_minus = 0\n[operator]\nalpha = 1\nc_f = 2\nfamily.0.sigma = 1, 0; 0, 1\nfamily.0.c = 1\nfamily.0.f = 1\n";
        let (nx, nt) = (11, 9);
        let s = discretize_thin(&inst(text), 0.05, &cfg(nx, nt)).unwrap();
        let mut nonzero = 0;
        for i in 1..nx - 1 {
            for j in 1..nt - 1 {
                let (x, t) = (i as f64 / (nx - 1) as f64, j as f64 / (nt - 1) as f64);
                let width = 2.0 + x / 2.0;
                let tx = -t * 0.5 / width;
                let got = s.mixed_moment(i * nt + j, 0, 0);
                assert!((got - tx).abs() <= 1e-12, "({i},{j}): {got} vs {tx}");
                nonzero += usize::from(got.abs() > 1e-3);
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn dirichlet_rows_are_identity() {
        let text = format!("{FLAT}[lateral]\nkind = dirichlet\nbeta = 2 + y\n");
        let eps = 0.1;
        let s = discretize_thin(&inst(&text), eps, &cfg(5, 5)).unwrap();
        for i in [0, 4] {
            for j in 1..4 {
                let k = i * 5 + j;
                let NodeRows::Boundary { row, op } = &s.rows[k] else { panic!("boundary row expected") };
                assert_eq!(row.diag, 1.0);
                assert!(row.nbrs.is_empty());
                assert!((row.rhs - (2.0 + s.points[k].1)).abs() < 1e-15);
                assert_eq!(*op, BoundaryOp { px: 0.0, py: 0.0, pv: 1.0 });
            }
        }
    }

    #[test]
    fn every_row_is_monotone() {
        let text = "[domain]\ng_plus = 1 + x/2\ng_minus = -1 + x*x/4\n[oblique]\ngamma1_plus = x/2\ngamma1_minus = -x/2\n\
            beta_plus = 0.1\nbeta_minus = -0.1\n[operator]\nalpha = 1\nc_f = 2\nfamily.0.sigma = 1, 0; 0, 1\n\
            family.0.drift = 1, -2\nfamily.0.c = 1\nfamily.0.f = 1\n";
        let s = discretize_thin(&inst(text), 0.1, &cfg(21, 11)).unwrap();
        let (w, d) = s.monotonicity_margin();
        assert!(w >= 0.0 && d >= 0.0);
    }

    #[test]
    fn cross_term_beyond_stencil_is_reported() {
        let text = "[domain]\ng_plus = 1 + 4*x\ng_minus = -1\n[oblique]\ngamma1_plus = 0\ngamma1_minus = 0\n\
            beta_plus = 0\nbeta_minus = 0\n[operator]\nalpha = 1\nc_f = 2\nfamily.0.sigma = 1, 0; 0, 1\nfamily.0.c = 1\nfamily.0.f = 1\n";
        let err = discretize_thin(&inst(text), 0.01, &cfg(5, 41)).unwrap_err();
        assert!(matches!(err, Error::Monotonicity { .. }), "{err}");
    }

    #[test]
    fn hybrid_drift() {
        assert_eq!(drift_weights(1.0, 0.1, 100.0, 100.0), (5.0, -5.0));
        assert_eq!(drift_weights(1.0, 0.1, 1.0, 1.0), (10.0, 0.0));
        assert_eq!(drift_weights(-1.0, 0.1, 1.0, 1.0), (0.0, 10.0));
    }
}
