//! Monotone scheme for the limit problem on `[0, 1]`.

use crate::check::{fmt_x, linspace};
use crate::error::{Error, Result};
use crate::fdsolver::scheme::{BoundaryOp, DiscreteScheme, Layout, LinRow, NodeRows};
use crate::fdsolver::thin::drift_weights;
use crate::fdsolver::SchemeConfig;
use crate::field::{fd, ScalarField};
use crate::limit::LimitOperator;
use crate::operators::check_normal_ellipticity;
use crate::problem::LateralBC;

pub fn discretize_limit(limop: &LimitOperator, lateral: &LateralBC, cfg: &SchemeConfig) -> Result<DiscreteScheme> {
    discretize_limit_with(limop, lateral, cfg, None)
}

/// As [`discretize_limit`]; with `exact`, every reduced source is shifted by
/// `G(exact)` and the endpoint data are taken from `exact`.
pub fn discretize_limit_with(
    limop: &LimitOperator,
    lateral: &LateralBC,
    cfg: &SchemeConfig,
    exact: Option<&ScalarField>,
) -> Result<DiscreteScheme> {
    let n = cfg.nx_limit;
    if n < 3 {
        return Err(Error::Config(format!("limit grid needs nx >= 3 (got {})", n)));
    }
    if let LateralBC::Dirichlet { .. } = lateral {
        check_normal_ellipticity(&limop.base, &limop.coeffs.gamma_o).into_result()?;
    }
    let xs = linspace(0.0, 1.0, n);
    let h = 1.0 / (n - 1) as f64;
    let jet = |x: f64| exact.map(|w| fd::jet(|s, _| w.eval(s, 0.0), x, 0.0));
    let mut rows = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let ex = jet(x);
        let end = i == 0 || i == n - 1;
        // endpoint datum: slope for Neumann/oblique, value for Dirichlet
        let slope = match (lateral, &ex) {
            (LateralBC::Dirichlet { beta }, _) if end => {
                let mut row = LinRow::new();
                row.diag = 1.0;
                row.rhs = ex.map(|e| e[0]).unwrap_or_else(|| beta.eval(x, 0.0));
                rows.push(NodeRows::Boundary { row, op: BoundaryOp { px: 0.0, py: 0.0, pv: 1.0 } });
                continue;
            }
            (_, Some(e)) => e[1],
            (LateralBC::Oblique { gamma1, beta, .. }, None) => beta.eval(x, 0.0) / gamma1.eval(x, 0.0),
            _ => 0.0,
        };
        let red = limop.reduced_at(x);
        let shift = ex.map(|e| limop.eval_reduced(e[3], e[1], e[0], x)).unwrap_or(0.0);
        let mut fams = Vec::with_capacity(red.len());
        for rl in &red {
            let mut r = Vec::with_capacity(rl.len());
            for fam in rl {
                let mut row = LinRow::new();
                let w = fam.a / (h * h);
                if i == 0 {
                    row.couple(1, 2.0 * w);
                    row.rhs = fam.f + shift + fam.b * slope - 2.0 * fam.a * slope / h;
                } else if i == n - 1 {
                    row.couple(n - 2, 2.0 * w);
                    row.rhs = fam.f + shift + fam.b * slope + 2.0 * fam.a * slope / h;
                } else {
                    let (de, dw) = drift_weights(fam.b, h, w, w);
                    row.couple(i + 1, w + de);
                    row.couple(i - 1, w + dw);
                    row.rhs = fam.f + shift;
                }
                if fam.a < 0.0 {
                    return Err(Error::Monotonicity { i, j: 0, reason: format!("negative diffusion at {}", fmt_x(x)) });
                }
                row.diag += fam.c;
                r.push(row);
            }
            fams.push(r);
        }
        rows.push(NodeRows::Families(fams));
    }
    let points = xs.iter().map(|&x| (x, 0.0)).collect();
    Ok(DiscreteScheme::new(Layout::Line { nx: n }, points, rows, 1))
}
