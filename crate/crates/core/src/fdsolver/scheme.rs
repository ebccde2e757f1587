//! Assembled monotone schemes. Every node carries either one linear
//! boundary row or a `[λ][μ]` grid of linear family rows; the nodal
//! residual is `min_λ max_μ` of the family rows.

use crate::fdsolver::band::BandMatrix;
use crate::fdsolver::grid::GridFunction;
use crate::operators::inf_sup;

/// `diag·u_c − Σ w_k u_k − rhs` with `w_k ≥ 0` and `diag ≥ Σ w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinRow {
    pub diag: f64,
    pub nbrs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinRow {
    pub fn new() -> LinRow {
        LinRow { diag: 0.0, nbrs: Vec::with_capacity(9), rhs: 0.0 }
    }

    /// Adds `w·(u_c − u_k)`.
    pub fn couple(&mut self, k: usize, w: f64) {
        if w == 0.0 {
            return;
        }
        self.diag += w;
        match self.nbrs.iter_mut().find(|e| e.0 == k) {
            Some(e) => e.1 += w,
            None => self.nbrs.push((k, w)),
        }
    }

    #[inline]
    pub fn eval(&self, c: usize, u: &[f64]) -> f64 {
        self.diag * u[c] - self.nbrs.iter().map(|&(k, w)| w * u[k]).sum::<f64>() - self.rhs
    }

    pub fn weight_sum(&self) -> f64 {
        self.nbrs.iter().map(|e| e.1).sum()
    }
}

impl Default for LinRow {
    fn default() -> Self {
        LinRow::new()
    }
}

/// Continuous boundary operator `px u_x + py u_y + pv u` imposed by a row,
/// used to regenerate boundary data from an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOp {
    pub px: f64,
    pub py: f64,
    pub pv: f64,
}

impl BoundaryOp {
    pub fn apply(&self, u: f64, ux: f64, uy: f64) -> f64 {
        self.px * ux + self.py * uy + self.pv * u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeRows {
    Boundary { row: LinRow, op: BoundaryOp },
    Families(Vec<Vec<LinRow>>),
}

impl NodeRows {
    pub fn rows(&self) -> Box<dyn Iterator<Item = &LinRow> + '_> {
        match self {
            NodeRows::Boundary { row, .. } => Box::new(std::iter::once(row)),
            NodeRows::Families(f) => Box::new(f.iter().flatten()),
        }
    }

    fn rows_mut(&mut self) -> Box<dyn Iterator<Item = &mut LinRow> + '_> {
        match self {
            NodeRows::Boundary { row, .. } => Box::new(std::iter::once(row)),
            NodeRows::Families(f) => Box::new(f.iter_mut().flatten()),
        }
    }

    /// Residual and the active `(λ, μ)`.
    #[inline]
    pub fn eval(&self, c: usize, u: &[f64]) -> (f64, usize, usize) {
        match self {
            NodeRows::Boundary { row, .. } => (row.eval(c, u), 0, 0),
            NodeRows::Families(f) => inf_sup(f.len(), f[0].len(), |l, m| f[l][m].eval(c, u)),
        }
    }

    pub fn active(&self, l: usize, m: usize) -> &LinRow {
        match self {
            NodeRows::Boundary { row, .. } => row,
            NodeRows::Families(f) => &f[l][m],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Thin { nx: usize, nt: usize, eps: f64 },
    Line { nx: usize },
}

#[derive(Debug, Clone)]
pub struct DiscreteScheme {
    pub layout: Layout,
    pub points: Vec<(f64, f64)>,
    pub rows: Vec<NodeRows>,
    /// lower = upper bandwidth of every row
    pub band: usize,
    /// per-node normalization: largest diagonal over the node's rows
    pub scale: Vec<f64>,
}

impl DiscreteScheme {
    pub fn new(layout: Layout, points: Vec<(f64, f64)>, rows: Vec<NodeRows>, band: usize) -> DiscreteScheme {
        let scale = rows.iter().map(|r| r.rows().fold(0.0, |m: f64, row| m.max(row.diag)).max(1e-300)).collect();
        DiscreteScheme { layout, points, rows, band, scale }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        match self.layout {
            Layout::Thin { nx, nt, .. } => (nx, nt),
            Layout::Line { nx } => (nx, 1),
        }
    }

    /// Normalized residual `S(u)_k = res_k(u) / scale_k`.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.rows.iter().enumerate().map(|(k, r)| r.eval(k, u).0 / self.scale[k]).collect()
    }

    pub fn residual_sup(&self, u: &[f64]) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0.0, |m, (k, r)| m.max((r.eval(k, u).0 / self.scale[k]).abs()))
    }

    /// Row Lipschitz bound of the normalized scheme, `max (diag + Σw)/scale`.
    pub fn lipschitz(&self) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| r.rows().map(|row| row.diag + row.weight_sum()).fold(0.0, f64::max) / self.scale[k])
            .fold(0.0, f64::max)
    }

    /// Linear system of the active policy at `u`.
    pub fn linearize(&self, u: &[f64]) -> (BandMatrix, Vec<f64>) {
        let n = self.len();
        let mut a = BandMatrix::zeros(n, self.band, self.band);
        let mut b = vec![0.0; n];
        for (k, r) in self.rows.iter().enumerate() {
            let (_, l, m) = r.eval(k, u);
            let row = r.active(l, m);
            a.add(k, k, row.diag);
            for &(j, w) in &row.nbrs {
                a.add(k, j, -w);
            }
            b[k] = row.rhs;
        }
        (a, b)
    }

    /// Smallest neighbor weight and smallest `diag − Σw` over all rows.
    pub fn monotonicity_margin(&self) -> (f64, f64) {
        let mut w_min = f64::INFINITY;
        let mut d_min = f64::INFINITY;
        for row in self.rows.iter().flat_map(|r| r.rows()) {
            for &(_, w) in &row.nbrs {
                w_min = w_min.min(w);
            }
            d_min = d_min.min((row.diag - row.weight_sum()) / row.diag.max(1e-300));
        }
        (w_min, d_min)
    }

    /// Adds `shift(x, y, op)` to every right-hand side; `op` is `None` for
    /// family rows.
    pub fn shift_rhs(&mut self, mut shift: impl FnMut(f64, f64, Option<&BoundaryOp>) -> f64) {
        for (k, r) in self.rows.iter_mut().enumerate() {
            let (x, y) = self.points[k];
            match r {
                NodeRows::Boundary { row, op } => row.rhs = shift(x, y, Some(op)),
                _ => {
                    let s = shift(x, y, None);
                    for row in r.rows_mut() {
                        row.rhs += s;
                    }
                }
            }
        }
    }

    /// `Σ w·δx·δt / 2` of one family row, with offsets measured in physical
    /// mapped units.
    pub fn mixed_moment(&self, k: usize, l: usize, m: usize) -> f64 {
        let Layout::Thin { nx, nt, .. } = self.layout else { return 0.0 };
        let (hx, ht) = (1.0 / (nx - 1) as f64, 1.0 / (nt - 1) as f64);
        let (ic, jc) = ((k / nt) as f64, (k % nt) as f64);
        self.rows[k]
            .active(l, m)
            .nbrs
            .iter()
            .map(|&(q, w)| w * ((q / nt) as f64 - ic) * hx * ((q % nt) as f64 - jc) * ht)
            .sum::<f64>()
            / 2.0
    }

    pub fn grid_function(&self, values: Vec<f64>) -> GridFunction {
        let (nx, nt) = self.dims();
        GridFunction { nx, nt, points: self.points.clone(), values }
    }
}
