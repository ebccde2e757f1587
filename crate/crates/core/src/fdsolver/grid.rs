use serde::Serialize;

use crate::check::linspace;
use crate::problem::geometry::ThinGrid;

/// Nodal values on a thin grid (`nt > 1`, t fastest) or on the base
/// interval (`nt == 1`, `y = 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub nx: usize,
    pub nt: usize,
    pub points: Vec<(f64, f64)>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn on_thin(grid: &ThinGrid, values: Vec<f64>) -> GridFunction {
        let points = (0..grid.len()).map(|k| grid.point(k)).collect();
        GridFunction { nx: grid.nx, nt: grid.nt, points, values }
    }

    pub fn on_line(xs: Vec<f64>, values: Vec<f64>) -> GridFunction {
        GridFunction { nx: xs.len(), nt: 1, points: xs.into_iter().map(|x| (x, 0.0)).collect(), values }
    }

    pub fn line(nx: usize, values: Vec<f64>) -> GridFunction {
        GridFunction::on_line(linspace(0.0, 1.0, nx), values)
    }

    pub fn from_fn(points: Vec<(f64, f64)>, nx: usize, nt: usize, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        let values = points.iter().map(|&(x, y)| f(x, y)).collect();
        GridFunction { nx, nt, points, values }
    }

    pub fn map(&self, f: impl Fn(f64, f64, f64) -> f64) -> GridFunction {
        let values = self.points.iter().zip(&self.values).map(|(&(x, y), &v)| f(x, y, v)).collect();
        GridFunction { values, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise linear interpolation in x of a base-interval function.
    pub fn interp_x(&self, x: f64) -> f64 {
        debug_assert_eq!(self.nt, 1);
        let n = self.nx;
        let xs = |i: usize| self.points[i].0;
        if x <= xs(0) {
            return self.values[0];
        }
        if x >= xs(n - 1) {
            return self.values[n - 1];
        }
        let i = self.points.partition_point(|p| p.0 <= x).saturating_sub(1).min(n - 2);
        let (x0, x1) = (xs(i), xs(i + 1));
        let w = (x - x0) / (x1 - x0);
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        if self.nt == 1 {
            s.push_str("x,u\n");
            for (p, v) in self.points.iter().zip(&self.values) {
                s.push_str(&format!("{:?},{:?}\n", p.0, v));
            }
        } else {
            s.push_str("x,y,u\n");
            for (p, v) in self.points.iter().zip(&self.values) {
                s.push_str(&format!("{:?},{:?},{:?}\n", p.0, p.1, v));
            }
        }
        s
    }
}

/// `max |u_thin(x,y) − u_limit(x)|` over the thin nodes, with the limit
/// interpolated linearly in x.
pub fn sup_norm_error(u_thin: &GridFunction, u_limit: &GridFunction) -> f64 {
    u_thin
        .points
        .iter()
        .zip(&u_thin.values)
        .fold(0.0, |m, (&(x, _), &v)| m.max((v - u_limit.interp_x(x)).abs()))
}
