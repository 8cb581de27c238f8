//! Small dense linear algebra for `n x n` real matrices with `n` in the
//! single digits.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    a: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Row-major entries. Panics unless `a.len() == n * n`.
    pub fn from_rows(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n, "matrix needs n*n entries");
        Self { n, a }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// `scale * v v^T`.
    pub fn outer(v: &[f64], scale: f64) -> Self {
        Self::from_fn(v.len(), |i, j| scale * v[i] * v[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, a: self.a.iter().map(|v| v * s).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|v| v.is_finite())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        match self.n {
            0 => 1.0,
            1 => self.a[0],
            2 => self.a[0] * self.a[3] - self.a[1] * self.a[2],
            _ => {
                let mut lu = self.a.clone();
                let n = self.n;
                let mut det = 1.0;
                for c in 0..n {
                    let p = (c..n).max_by(|&r, &s| lu[r * n + c].abs().total_cmp(&lu[s * n + c].abs())).unwrap();
                    if lu[p * n + c] == 0.0 {
                        return 0.0;
                    }
                    if p != c {
                        for j in 0..n {
                            lu.swap(p * n + j, c * n + j);
                        }
                        det = -det;
                    }
                    let piv = lu[c * n + c];
                    det *= piv;
                    for r in c + 1..n {
                        let f = lu[r * n + c] / piv;
                        for j in c..n {
                            lu[r * n + j] -= f * lu[c * n + j];
                        }
                    }
                }
                det
            }
        }
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` for a singular matrix.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut m = self.a.clone();
        let mut x = b.to_vec();
        for c in 0..n {
            let p = (c..n).max_by(|&r, &s| m[r * n + c].abs().total_cmp(&m[s * n + c].abs()))?;
            if m[p * n + c] == 0.0 || !m[p * n + c].is_finite() {
                return None;
            }
            if p != c {
                for j in 0..n {
                    m.swap(p * n + j, c * n + j);
                }
                x.swap(p, c);
            }
            for r in c + 1..n {
                let f = m[r * n + c] / m[c * n + c];
                for j in c..n {
                    m[r * n + j] -= f * m[c * n + j];
                }
                x[r] -= f * x[c];
            }
        }
        for c in (0..n).rev() {
            let s: f64 = (c + 1..n).map(|j| m[c * n + j] * x[j]).sum();
            x[c] = (x[c] - s) / m[c * n + c];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }

    /// Lower-triangular `L` with `L L^T = self`, or `None` if the matrix is
    /// not positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
                if i == j {
                    let d = self[(i, i)] - s;
                    if !(d > 0.0) {
                        return None;
                    }
                    l[(i, i)] = libm::sqrt(d);
                } else {
                    l[(i, j)] = (self[(i, j)] - s) / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.clone();
        for _sweep in 0..64 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off <= 1e-30 * (1.0 + a.max_abs() * a.max_abs()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Smallest eigenvalue of the pencil `(self, b)` for `b` positive
    /// definite, i.e. of `L^-1 self L^-T` with `b = L L^T`.
    pub fn min_generalized_eigenvalue(&self, b: &Self) -> Option<f64> {
        let l = b.cholesky()?;
        let n = self.n;
        // Solve L Y = self, then L Z^T = Y^T.
        let linv = l.inverse()?;
        let c = &(&linv * self) * &linv.transpose();
        let sym = Self::from_fn(n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
        sym.symmetric_eigenvalues().first().copied()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        Matrix { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        Matrix { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect() }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * o[(k, j)]).sum())
    }
}
