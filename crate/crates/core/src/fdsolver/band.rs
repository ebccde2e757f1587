//! Banded matrices with an in-place LU factorization without pivoting,
//! adequate for the M-matrices produced by monotone schemes.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> BandMatrix {
        BandMatrix { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    #[inline]
    fn pos(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            return 0.0;
        }
        self.data[self.pos(i, j)]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.pos(i, j);
        self.data[p] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`, consuming the matrix. Returns `None` on a zero pivot.
    pub fn solve(mut self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        for k in 0..n {
            let piv = self.data[self.pos(k, k)];
            if piv == 0.0 || !piv.is_finite() {
                return None;
            }
            let imax = (k + self.kl + 1).min(n);
            let jmax = (k + self.ku + 1).min(n);
            for i in k + 1..imax {
                let pik = self.pos(i, k);
                let l = self.data[pik] / piv;
                if l == 0.0 {
                    continue;
                }
                self.data[pik] = l;
                for j in k + 1..jmax {
                    let pkj = self.pos(k, j);
                    let pij = self.pos(i, j);
                    self.data[pij] -= l * self.data[pkj];
                }
            }
        }
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(self.kl);
            let s: f64 = (lo..i).map(|j| self.data[self.pos(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let hi = (i + self.ku + 1).min(n);
            let s: f64 = (i + 1..hi).map(|j| self.data[self.pos(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.data[self.pos(i, i)];
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 3.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let y = a.solve(&b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_band_solve() {
        let (n, k) = (60, 7);
        let mut a = BandMatrix::zeros(n, k, k);
        for i in 0..n {
            a.add(i, i, 10.0 + i as f64 * 0.1);
            for d in 1..=k {
                if i >= d {
                    a.add(i, i - d, -0.5 / d as f64);
                }
                if i + d < n {
                    a.add(i, i + d, -0.7 / d as f64);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.3).cos()).collect();
        let y = a.clone().solve(&a.matvec(&x)).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
