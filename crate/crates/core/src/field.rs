//! Analytic fields on `[0,1]` and `[0,1]×[-1,1]`, one-dimensional curves, and
//! the finite-difference derivatives used whenever no derivative expression
//! is supplied.

use std::fmt;
use std::sync::Arc;

use crate::expr::{Expr, Var};

/// Where a field is declared: the base interval or the strip `[0,1]×[-1,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Line,
    Strip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub key: String,
    pub expr: Expr,
    pub dx: Option<Expr>,
    pub dy: Option<Expr>,
    pub domain: Domain,
}

impl ScalarField {
    pub fn new(key: impl Into<String>, expr: Expr, domain: Domain) -> ScalarField {
        ScalarField { key: key.into(), expr, dx: None, dy: None, domain }
    }

    pub fn parse(key: &str, src: &str, domain: Domain) -> Result<ScalarField, crate::expr::ExprError> {
        Ok(ScalarField::new(key, Expr::parse(src)?, domain))
    }

    pub fn constant(key: impl Into<String>, v: f64, domain: Domain) -> ScalarField {
        ScalarField::new(key, Expr::Const(v), domain)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.expr.eval(x, y)
    }

    pub fn ddx(&self, x: f64, y: f64) -> f64 {
        match &self.dx {
            Some(d) => d.eval(x, y),
            None => fd::d1(|s| self.eval(s, y), x, 0.0, 1.0),
        }
    }

    pub fn ddy(&self, x: f64, y: f64) -> f64 {
        match &self.dy {
            Some(d) => d.eval(x, y),
            None => fd::d1(|s| self.eval(x, s), y, -1.0, 1.0),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.expr.uses(Var::X) && !self.expr.uses(Var::Y)
    }

    /// Trace `x ↦ f(x, y0)` as a curve, keeping the analytic x-derivative if any.
    pub fn trace(&self, y0: f64) -> Curve {
        let f = self.expr.with_y(y0);
        let c = Curve::new(move |x| f.eval(x, 0.0));
        match &self.dx {
            Some(d) => {
                let d = d.with_y(y0);
                c.with_derivative(move |x| d.eval(x, 0.0))
            }
            None => c,
        }
    }

    /// The field as a curve in x (for fields declared on the base interval).
    pub fn curve(&self) -> Curve {
        self.trace(0.0)
    }
}

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function of `x ∈ [0,1]` with optional analytic first and second
/// derivatives; missing derivatives fall back to [`fd`].
#[derive(Clone)]
pub struct Curve {
    f: Fn1,
    df: Option<Fn1>,
    ddf: Option<Fn1>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve(analytic d1: {}, d2: {})", self.df.is_some(), self.ddf.is_some())
    }
}

impl Curve {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Curve {
        Curve { f: Arc::new(f), df: None, ddf: None }
    }

    pub fn constant(v: f64) -> Curve {
        Curve::new(move |_| v).with_derivative(|_| 0.0).with_second_derivative(|_| 0.0)
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Curve {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_second_derivative(mut self, ddf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Curve {
        self.ddf = Some(Arc::new(ddf));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        match &self.df {
            Some(df) => df(x),
            None => fd::d1(&*self.f, x, 0.0, 1.0),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match (&self.ddf, &self.df) {
            (Some(ddf), _) => ddf(x),
            (None, Some(df)) => fd::d1(&**df, x, 0.0, 1.0),
            (None, None) => fd::d2(&*self.f, x, 0.0, 1.0),
        }
    }

    /// The derivative as a curve of its own.
    pub fn derivative(&self) -> Curve {
        let me = self.clone();
        let me2 = self.clone();
        Curve::new(move |x| me.d1(x)).with_derivative(move |x| me2.d2(x))
    }

    /// Natural cubic spline through `(xs[i], values[i])`, `xs` increasing.
    pub fn spline(xs: &[f64], values: &[f64]) -> Curve {
        let s = Arc::new(Spline::new(xs, values));
        let (s1, s2) = (s.clone(), s.clone());
        Curve::new(move |x| s.eval(x).0)
            .with_derivative(move |x| s1.eval(x).1)
            .with_second_derivative(move |x| s2.eval(x).2)
    }
}

struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(xs: &[f64], ys: &[f64]) -> Spline {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n, "spline needs matching samples");
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for the second derivatives, natural ends
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let rhs = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (rhs - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Spline { xs: xs.to_vec(), ys: ys.to_vec(), m }
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.xs.len();
        let k = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }
}

/// Fourth-order finite differences that never step outside `[lo, hi]`.
pub mod fd {
    pub const H1: f64 = 1e-4;
    pub const H2: f64 = 1e-3;

    pub fn d1(f: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
        let h = H1;
        if x - 2.0 * h >= lo && x + 2.0 * h <= hi {
            (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
        } else if x + 4.0 * h <= hi {
            (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) + 16.0 * f(x + 3.0 * h) - 3.0 * f(x + 4.0 * h))
                / (12.0 * h)
        } else {
            (25.0 * f(x) - 48.0 * f(x - h) + 36.0 * f(x - 2.0 * h) - 16.0 * f(x - 3.0 * h) + 3.0 * f(x - 4.0 * h))
                / (12.0 * h)
        }
    }

    pub fn d2(f: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
        let h = H2;
        if x - 2.0 * h >= lo && x + 2.0 * h <= hi {
            (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
        } else {
            let s = if x + 5.0 * h <= hi { 1.0 } else { -1.0 };
            let g = |k: f64| f(x + s * k * h);
            (45.0 * g(0.0) - 154.0 * g(1.0) + 214.0 * g(2.0) - 156.0 * g(3.0) + 61.0 * g(4.0) - 10.0 * g(5.0))
                / (12.0 * h * h)
        }
    }

    /// `(u, u_x, u_y, u_xx, u_xy, u_yy)` by centered differences with one
    /// Richardson step, for functions defined beyond the evaluation point.
    pub fn jet(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> [f64; 6] {
        let inf = f64::INFINITY;
        let ux = d1(|s| f(s, y), x, -inf, inf);
        let uy = d1(|s| f(x, s), y, -inf, inf);
        let uxx = d2(|s| f(s, y), x, -inf, inf);
        let uyy = d2(|s| f(x, s), y, -inf, inf);
        let cross = |h: f64| (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
        let (a, b) = (cross(H2), cross(2.0 * H2));
        [f(x, y), ux, uy, uxx, a + (a - b) / 3.0, uyy]
    }
}
