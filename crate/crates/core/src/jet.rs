//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `c_a` of `f(x0 + h) = Σ c_a h^a`
//! for all multi-indices with `|a| <= degree`. Monomials are ordered by total
//! degree first, so the jet of a lower degree is a prefix of the higher one.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct JetAlgebra {
    n: usize,
    degree: usize,
    monomials: Vec<Vec<u8>>,
    /// `(a, b, c)` with `mono[a] + mono[b] = mono[c]`.
    mul_table: Vec<(u32, u32, u32)>,
    /// Per variable: `(target, source, factor)` for `d/dh_i`.
    diff_tables: Vec<Vec<(u32, u32, f64)>>,
}

fn monomials_of_degree(n: usize, d: usize) -> Vec<Vec<u8>> {
    if n == 1 {
        return vec![vec![d as u8]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - first) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

impl JetAlgebra {
    pub fn new(n: usize, degree: usize) -> Self {
        assert!(n >= 1, "jets need at least one variable");
        let monomials: Vec<Vec<u8>> = (0..=degree).flat_map(|d| monomials_of_degree(n, d)).collect();
        let find = |m: &[u8]| monomials.iter().position(|x| x.as_slice() == m);
        let mut mul_table = Vec::new();
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                let sum: Vec<u8> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if let Some(c) = find(&sum) {
                    mul_table.push((a as u32, b as u32, c as u32));
                }
            }
        }
        let diff_tables = (0..n)
            .map(|i| {
                let mut t = Vec::new();
                for (target, m) in monomials.iter().enumerate() {
                    let mut up = m.clone();
                    up[i] += 1;
                    if let Some(source) = find(&up) {
                        t.push((target as u32, source as u32, f64::from(up[i])));
                    }
                }
                t
            })
            .collect();
        Self { n, degree, monomials, mul_table, diff_tables }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, idx: usize) -> &[u8] {
        &self.monomials[idx]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.monomials.iter().position(|m| m.as_slice() == exps)
    }

    /// Number of coefficients of total degree `<= d`.
    pub fn len_up_to(&self, d: usize) -> usize {
        self.monomials.iter().take_while(|m| m.iter().map(|&e| e as usize).sum::<usize>() <= d).count()
    }

    pub fn constant(&self, c: f64) -> Jet<'_> {
        let mut v = vec![0.0; self.len()];
        v[0] = c;
        Jet { alg: self, c: v }
    }

    /// The jet of the coordinate function `x_i` at `x_i = at`.
    pub fn variable(&self, i: usize, at: f64) -> Jet<'_> {
        let mut j = self.constant(at);
        if self.degree >= 1 {
            let mut e = vec![0u8; self.n];
            e[i] = 1;
            j.c[self.index_of(&e).unwrap()] = 1.0;
        }
        j
    }

    pub fn from_coeffs(&self, c: Vec<f64>) -> Jet<'_> {
        assert_eq!(c.len(), self.len(), "coefficient count mismatch");
        Jet { alg: self, c }
    }

    /// Keeps the coefficients of total degree `<= self.degree()` of a jet
    /// over the same variables.
    pub fn truncate<'a>(&'a self, j: &Jet<'_>) -> Jet<'a> {
        assert_eq!(self.n, j.alg.n);
        let mut c = j.c.clone();
        c.resize(self.len(), 0.0);
        Jet { alg: self, c }
    }
}

#[derive(Debug, Clone)]
pub struct Jet<'a> {
    alg: &'a JetAlgebra,
    c: Vec<f64>,
}

impl<'a> Jet<'a> {
    pub fn algebra(&self) -> &'a JetAlgebra {
        self.alg
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, exps: &[u8]) -> f64 {
        self.alg.index_of(exps).map_or(0.0, |i| self.c[i])
    }

    /// `∂^a f(x0) = a! c_a`.
    pub fn partial(&self, exps: &[u8]) -> f64 {
        let fact: f64 = exps.iter().map(|&e| (1..=e).map(f64::from).product::<f64>()).product();
        fact * self.coeff(exps)
    }

    /// `∂f/∂x_i`; its top-degree coefficients are zero and carry no
    /// information.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = vec![0.0; self.c.len()];
        for &(t, s, f) in &self.alg.diff_tables[i] {
            out[t as usize] = f * self.c[s as usize];
        }
        Jet { alg: self.alg, c: out }
    }

    /// First derivatives at the expansion point.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.alg.n)
            .map(|i| {
                let mut e = vec![0u8; self.alg.n];
                e[i] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// Second derivatives at the expansion point, row-major.
    pub fn hessian(&self) -> Vec<f64> {
        let n = self.alg.n;
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0u8; n];
                e[i] += 1;
                e[j] += 1;
                h[i * n + j] = self.partial(&e);
            }
        }
        h
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet { alg: self.alg, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet { alg: self.alg, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet { alg: self.alg, c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn add_const(&self, s: f64) -> Self {
        let mut c = self.c.clone();
        c[0] += s;
        Jet { alg: self.alg, c }
    }

    /// `self + s * o`.
    pub fn axpy(&self, s: f64, o: &Self) -> Self {
        Jet { alg: self.alg, c: self.c.iter().zip(&o.c).map(|(a, b)| a + s * b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![0.0; self.c.len()];
        for &(a, b, c) in &self.alg.mul_table {
            out[c as usize] += self.c[a as usize] * o.c[b as usize];
        }
        Jet { alg: self.alg, c: out }
    }

    /// `Σ_k coeffs[k] (self - self(0))^k`, i.e. a univariate function applied
    /// through its Taylor series at the constant term.
    fn compose_series(&self, coeffs: &[f64]) -> Self {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut out = self.alg.constant(coeffs[0]);
        let mut p = self.alg.constant(1.0);
        for &ck in coeffs.iter().skip(1).take(self.alg.degree) {
            p = p.mul(&h);
            out = out.axpy(ck, &p);
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = libm::exp(self.c[0]);
        let mut coeffs = vec![e; self.alg.degree + 1];
        for k in 1..coeffs.len() {
            coeffs[k] = coeffs[k - 1] / k as f64;
        }
        self.compose_series(&coeffs)
    }

    pub fn ln(&self) -> Self {
        let a = self.c[0];
        let mut coeffs = vec![libm::log(a); self.alg.degree + 1];
        let mut p = 1.0;
        for k in 1..coeffs.len() {
            p /= a;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs[k] = sign * p / k as f64;
        }
        self.compose_series(&coeffs)
    }

    pub fn recip(&self) -> Self {
        let a = self.c[0];
        let mut coeffs = vec![1.0 / a; self.alg.degree + 1];
        for k in 1..coeffs.len() {
            coeffs[k] = -coeffs[k - 1] / a;
        }
        self.compose_series(&coeffs)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn powi(&self, e: i32) -> Self {
        if e < 0 {
            return self.recip().powi(-e);
        }
        let mut out = self.alg.constant(1.0);
        let mut base = self.clone();
        let mut k = e as u32;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }
}

/// Determinant of a square matrix of jets by cofactor expansion.
pub fn jet_det<'a>(m: &[Jet<'a>], n: usize) -> Jet<'a> {
    match n {
        1 => m[0].clone(),
        2 => m[0].mul(&m[3]).sub(&m[1].mul(&m[2])),
        _ => {
            let mut acc = m[0].scale(0.0);
            for col in 0..n {
                let minor: Vec<Jet<'a>> = (1..n)
                    .flat_map(|r| (0..n).filter(move |&c| c != col).map(move |c| (r, c)))
                    .map(|(r, c)| m[r * n + c].clone())
                    .collect();
                let term = m[col].mul(&jet_det(&minor, n - 1));
                acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}
