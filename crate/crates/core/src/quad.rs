//! Deterministic Gauss–Legendre quadrature: tensor rules on boxes, collapsed
//! rules on simplices and polytopes, and the path rule on `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::{GeometryError, Polytope, ToricGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Collapsed Gauss–Legendre on a triangulation of the moment polytope,
    /// pulled back to `x` through the reference moment map.
    Moment,
    /// Tensor Gauss–Legendre on the box `[-L, L]ⁿ` in `x`.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub domain: Domain,
    pub half_width: f64,
    pub nodes_per_axis: usize,
    pub t_nodes: usize,
}

impl GridSpec {
    pub fn default_for(n: usize) -> Self {
        Self { domain: Domain::Moment, half_width: 20.0, nodes_per_axis: if n <= 1 { 64 } else { 48 }, t_nodes: 16 }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let ok = self.half_width > 0.0
            && self.half_width.is_finite()
            && self.nodes_per_axis >= 8
            && self.nodes_per_axis % 2 == 0
            && self.t_nodes >= 4;
        if ok {
            Ok(())
        } else {
            Err(QuadError::InvalidGrid)
        }
    }

    /// The embedded coarse grid used for error estimates.
    pub fn halved(&self) -> Self {
        Self { nodes_per_axis: self.nodes_per_axis / 2, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub error_estimate: f64,
}

impl IntegralValue {
    pub fn new(value: f64, coarse: f64) -> Self {
        Self { value, error_estimate: (value - coarse).abs() }
    }

    pub fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0 }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { value: self.value * s, error_estimate: self.error_estimate * s.abs() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    InvalidGrid,
    NonFinite { at: Vec<f64> },
    Geometry(GeometryError),
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidGrid => write!(f, "grid needs L > 0, N >= 8 even, t_nodes >= 4"),
            Self::NonFinite { at } => write!(f, "non-finite integrand at {at:?}"),
            Self::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for QuadError {}

impl From<GeometryError> for QuadError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // For m = 1 the loop leaves p1 = P1 and p0 = P0 = 1.
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre on `[0, 1]`.
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// A list of nodes with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sum(&self, mut f: impl FnMut(&[f64]) -> Result<f64, QuadError>) -> Result<f64, QuadError> {
        let mut acc = CompensatedSum::default();
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(p)?;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { at: p.clone() });
            }
            acc.add(w * v);
        }
        Ok(acc.value())
    }
}

/// Tensor rule on `[-L, L]ⁿ`.
pub fn box_rule(n: usize, half_width: f64, m: usize) -> Rule {
    let (x, w) = gauss_legendre(m);
    let mut points = vec![Vec::new()];
    let mut weights = vec![1.0];
    for _ in 0..n {
        let mut np = Vec::with_capacity(points.len() * m);
        let mut nw = Vec::with_capacity(points.len() * m);
        for (p, pw) in points.iter().zip(&weights) {
            for (xi, wi) in x.iter().zip(&w) {
                let mut q = p.clone();
                q.push(half_width * xi);
                np.push(q);
                nw.push(pw * wi * half_width);
            }
        }
        points = np;
        weights = nw;
    }
    Rule { points, weights }
}

/// Collapsed (Duffy) rule on the simplex with the given `n + 1` vertices:
/// `p = v0 + ξ1((v1 - v0) + ξ2((v2 - v1) + ...))` with Jacobian
/// `|det(v1 - v0, ..., vn - v(n-1))| Π ξ_j^{n-j}`.
pub fn simplex_rule(vertices: &[Vec<f64>], m: usize) -> Rule {
    let n = vertices.len() - 1;
    let (t, tw) = gauss_legendre_unit(m);
    let edges: Vec<Vec<f64>> = (0..n).map(|j| vertices[j + 1].iter().zip(&vertices[j]).map(|(a, b)| a - b).collect()).collect();
    let jac = crate::linalg::Matrix::from_fn(n, |i, j| edges[j][i]).det().abs();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let total = m.pow(n as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut xi = vec![0.0; n];
        let mut w = jac;
        for j in (0..n).rev() {
            let k = idx % m;
            idx /= m;
            xi[j] = t[k];
            w *= tw[k] * libm::pow(t[k], (n - 1 - j) as f64);
        }
        // Horner-style nesting from the innermost edge outward.
        let mut d = vec![0.0; n];
        for j in (0..n).rev() {
            for (dc, e) in d.iter_mut().zip(&edges[j]) {
                *dc = xi[j] * (*dc + e);
            }
        }
        points.push(vertices[0].iter().zip(&d).map(|(a, b)| a + b).collect());
        weights.push(w);
    }
    Rule { points, weights }
}

/// Union of collapsed rules over the polytope's triangulation.
pub fn polytope_rule(p: &Polytope, m: usize) -> Rule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for s in p.simplices() {
        let verts: Vec<Vec<f64>> = s.iter().map(|&k| p.vertices()[k].clone()).collect();
        let r = simplex_rule(&verts, m);
        points.extend(r.points);
        weights.extend(r.weights);
    }
    Rule { points, weights }
}

/// `(2π)ⁿ ∫ density(x) dx` over ℝⁿ for the reference metric of `geo`.
///
/// On the box domain this is the tensor rule on `[-L, L]ⁿ`. On the moment
/// domain each polytope node `μ` is mapped to `x(μ)` with weight
/// `w_μ / det G_ref(x)`.
pub fn integrate(geo: &ToricGeometry, grid: &GridSpec, mut density: impl FnMut(&[f64]) -> Result<f64, QuadError>) -> Result<IntegralValue, QuadError> {
    grid.validate()?;
    let n = geo.dim();
    let two_pi_n = libm::pow(2.0 * PI, n as f64);
    let mut run = |m: usize| -> Result<f64, QuadError> {
        match grid.domain {
            Domain::Box => box_rule(n, grid.half_width, m).sum(&mut density),
            Domain::Moment => polytope_rule(geo.polytope(), m).sum(|mu| {
                let rp = geo.ref_point_from_mu(mu)?;
                let g = geo.metric(&rp.potential, &rp.x)?;
                Ok(density(&rp.x)? / g.g.det())
            }),
        }
    };
    let fine = run(grid.nodes_per_axis)?;
    let coarse = run(grid.nodes_per_axis / 2)?;
    Ok(IntegralValue::new(fine, coarse).scale(two_pi_n))
}

/// `∫_0^1 f(t) dt` with `t_nodes` Gauss–Legendre points; the error estimate
/// is the difference from the rule with half as many points.
pub fn path_integrate(mut f: impl FnMut(f64) -> Result<f64, QuadError>, t_nodes: usize) -> Result<IntegralValue, QuadError> {
    let mut run = |m: usize| -> Result<f64, QuadError> {
        let (t, w) = gauss_legendre_unit(m);
        let mut acc = CompensatedSum::default();
        for (ti, wi) in t.iter().zip(&w) {
            let v = f(*ti)?;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { at: vec![*ti] });
            }
            acc.add(wi * v);
        }
        Ok(acc.value())
    };
    let fine = run(t_nodes)?;
    let coarse = run((t_nodes / 2).max(1))?;
    Ok(IntegralValue::new(fine, coarse))
}

/// Vector-valued [`path_integrate`]: every component shares the `t` nodes.
pub fn path_integrate_many(
    mut f: impl FnMut(f64) -> Result<Vec<f64>, QuadError>,
    len: usize,
    t_nodes: usize,
) -> Result<Vec<IntegralValue>, QuadError> {
    let mut run = |m: usize| -> Result<Vec<f64>, QuadError> {
        let (t, w) = gauss_legendre_unit(m);
        let mut acc = vec![CompensatedSum::default(); len];
        for (ti, wi) in t.iter().zip(&w) {
            let v = f(*ti)?;
            if v.iter().any(|e| !e.is_finite()) {
                return Err(QuadError::NonFinite { at: vec![*ti] });
            }
            for (a, e) in acc.iter_mut().zip(&v) {
                a.add(wi * e);
            }
        }
        Ok(acc.iter().map(CompensatedSum::value).collect())
    };
    let fine = run(t_nodes)?;
    let coarse = run((t_nodes / 2).max(1))?;
    Ok(fine.iter().zip(&coarse).map(|(a, b)| IntegralValue::new(*a, *b)).collect())
}
