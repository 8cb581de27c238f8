//! Reference potentials: Fubini–Study on ℂPⁿ and the Guillemin potential of
//! a Delzant polytope, each with its moment map and order-4 jets.

use alloc::vec;
use alloc::vec::Vec;

use super::{GeometryError, Polytope};
use crate::jet::{Jet, JetAlgebra};
use crate::linalg::Matrix;

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;

/// Builds the Taylor jet of `Φ` from its value and the jets of `μ = ½∇Φ`.
/// `mu_jets` must be accurate through degree `degree - 1`.
pub(crate) fn potential_from_moment<'a>(alg: &'a JetAlgebra, value: f64, mu_jets: &[Jet<'_>]) -> Jet<'a> {
    let mut c = vec![0.0; alg.len()];
    c[0] = value;
    for (idx, slot) in c.iter_mut().enumerate().skip(1) {
        let m = alg.monomial(idx);
        let i = m.iter().position(|&e| e > 0).unwrap();
        let mut lower = m.to_vec();
        lower[i] -= 1;
        *slot = 2.0 * mu_jets[i].coeff(&lower) / f64::from(m[i]);
    }
    alg.from_coeffs(c)
}

/// Fubini–Study: `Φ = (n+1) log(1 + Σ e^{2x_i})`, `μ_i = (n+1) e^{2x_i} / (1 + Σ e^{2x})`.
///
/// Each `p_i = μ_i / (n+1)` is formed as `1 / Σ_j e^{2(y_j - y_i)}` with
/// `y_0 = 0`, which keeps relative accuracy of all Taylor coefficients near
/// the vertices of the simplex.
pub(crate) fn fubini_study_jets<'a>(alg: &'a JetAlgebra, x: &[f64]) -> (Vec<Jet<'a>>, f64) {
    let n = x.len();
    let scale = (n + 1) as f64;
    let mut y: Vec<Jet<'a>> = Vec::with_capacity(n + 1);
    y.push(alg.constant(0.0));
    for (i, &xi) in x.iter().enumerate() {
        y.push(alg.variable(i, xi).scale(2.0));
    }
    let mu = (1..=n)
        .map(|i| {
            let mut s = alg.constant(0.0);
            for yj in &y {
                s = s.add(&yj.sub(&y[i]).exp());
            }
            s.recip().scale(scale)
        })
        .collect();
    let m = x.iter().fold(0.0f64, |a, &b| a.max(b));
    let lse: f64 = libm::exp(-2.0 * m) + x.iter().map(|&xi| libm::exp(2.0 * (xi - m))).sum::<f64>();
    let value = scale * (2.0 * m + libm::log(lse));
    (mu, value)
}

/// Inverse moment map of the Fubini–Study potential.
pub(crate) fn fubini_study_x(mu: &[f64]) -> Vec<f64> {
    let n = mu.len();
    let p0 = (n + 1) as f64 - mu.iter().sum::<f64>();
    mu.iter().map(|m| 0.5 * libm::log(m / p0)).collect()
}

/// `x = ∇g(μ) = ½ Σ a_i (log ℓ_i + 1)`.
pub fn guillemin_gradient(p: &Polytope, mu: &[f64]) -> Vec<f64> {
    let l: Vec<f64> = p.facets().iter().map(|f| f.eval(mu)).collect();
    gradient_from_l(p, &l)
}

fn gradient_from_l(p: &Polytope, l: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; p.dim()];
    for (f, &li) in p.facets().iter().zip(l) {
        let w = 0.5 * (libm::log(li) + 1.0);
        for (xj, &a) in x.iter_mut().zip(&f.normal) {
            *xj += w * a as f64;
        }
    }
    x
}

fn guillemin_hessian(p: &Polytope, mu: &[f64]) -> Matrix {
    let n = p.dim();
    let mut h = Matrix::zeros(n);
    for f in p.facets() {
        let w = 0.5 / f.eval(mu);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] += w * (f.normal[i] * f.normal[j]) as f64;
            }
        }
    }
    h
}

/// `g(μ) = ½ Σ ℓ_i log ℓ_i`.
pub fn guillemin_symplectic(p: &Polytope, mu: &[f64]) -> f64 {
    let l: Vec<f64> = p.facets().iter().map(|f| f.eval(mu)).collect();
    symplectic_from_l(&l)
}

fn symplectic_from_l(l: &[f64]) -> f64 {
    l.iter().map(|&v| 0.5 * v * libm::log(v)).sum()
}

/// A solution of `∇g(μ) = x`. The facet values `l` are carried separately
/// from `μ` and stay accurate relative to their size near the boundary,
/// where `μ` alone cannot resolve them.
#[derive(Debug, Clone)]
pub struct LegendrePoint {
    pub mu: Vec<f64>,
    pub l: Vec<f64>,
    vertex: usize,
}

impl LegendrePoint {
    /// Treats `mu` as exact and picks its chart.
    pub fn from_mu(p: &Polytope, mu: &[f64]) -> Self {
        let l = p.facets().iter().map(|f| f.eval(mu)).collect();
        Self { mu: mu.to_vec(), l, vertex: best_vertex(p, mu) }
    }
}

/// Affine chart `μ = v + A^{-1} s` at a vertex `v`, where `s` are the values
/// of the `n` facets through `v` and every facet is `ℓ_j = ℓ_j(v) + ⟨c_j, s⟩`.
struct Chart {
    v: Vec<f64>,
    tight: Vec<usize>,
    ainv: Matrix,
    c: Vec<Vec<f64>>,
    lv: Vec<f64>,
}

impl Chart {
    fn new(p: &Polytope, vertex: usize) -> Self {
        let n = p.dim();
        let v = p.vertices()[vertex].clone();
        let tight: Vec<usize> =
            (0..p.facets().len()).filter(|&j| p.facets()[j].eval(&v).abs() < 1e-9).collect();
        let a = Matrix::from_fn(n, |i, k| p.facets()[tight[i]].normal[k] as f64);
        let ainv = a.inverse().expect("Delzant vertex normals are a basis");
        let mut c = Vec::new();
        let mut lv = Vec::new();
        for (j, f) in p.facets().iter().enumerate() {
            if let Some(k) = tight.iter().position(|&t| t == j) {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                c.push(e);
                lv.push(0.0);
            } else {
                // c_j = A^{-T} a_j; integral for Delzant polytopes.
                c.push((0..n).map(|k| libm::round((0..n).map(|r| ainv[(r, k)] * f.normal[r] as f64).sum())).collect());
                lv.push(f.eval(&v));
            }
        }
        Self { v, tight, ainv, c, lv }
    }

    fn facet_values(&self, s: &[f64]) -> Vec<f64> {
        self.c
            .iter()
            .zip(&self.lv)
            .enumerate()
            .map(|(j, (cj, lv))| match self.tight.iter().position(|&t| t == j) {
                Some(k) => s[k],
                None => lv + cj.iter().zip(s).map(|(a, b)| a * b).sum::<f64>(),
            })
            .collect()
    }

    fn mu(&self, s: &[f64]) -> Vec<f64> {
        let d = self.ainv.mul_vec(s);
        self.v.iter().zip(&d).map(|(a, b)| a + b).collect()
    }
}

/// The vertex whose non-incident facets stay farthest from `mu`.
fn best_vertex(p: &Polytope, mu: &[f64]) -> usize {
    let l: Vec<f64> = p.facets().iter().map(|f| f.eval(mu)).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in p.vertices().iter().enumerate() {
        let far = p
            .facets()
            .iter()
            .zip(&l)
            .filter(|(f, _)| f.eval(v).abs() >= 1e-9)
            .map(|(_, &lj)| lj)
            .fold(f64::INFINITY, f64::min);
        if far > best.1 {
            best = (k, far);
        }
    }
    best.0
}

/// Solves `∇g(μ) = x`, starting from `start`.
///
/// A damped Newton pass in `μ` locates the relevant vertex chart; a second
/// damped Newton pass in the chart variables `s` (with the diagonal scaling
/// `diag(sqrt(2 s))`) converges to `|∇g - x| <= tol` even where some `ℓ_i`
/// is far below the resolution of `μ`.
pub fn guillemin_solve(p: &Polytope, x: &[f64], start: &[f64]) -> Result<LegendrePoint, GeometryError> {
    let fail = |iterations| GeometryError::NewtonFailed { x: x.to_vec(), iterations };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(fail(0));
    }
    let n = p.dim();
    let tol = NEWTON_TOL * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let residual = |l: &[f64]| gradient_from_l(p, l).iter().zip(x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    // Pass 1: plain damped Newton in μ until converged or stalled.
    let mut mu = start.to_vec();
    let mut iters = 0;
    while iters < NEWTON_MAX_ITER {
        iters += 1;
        let grad: Vec<f64> = guillemin_gradient(p, &mu).iter().zip(x).map(|(a, b)| a - b).collect();
        if grad.iter().all(|r| r.abs() <= tol) {
            return Ok(LegendrePoint::from_mu(p, &mu));
        }
        let Some(step) = guillemin_hessian(p, &mu).solve(&grad) else { return Err(fail(iters)) };
        let mut alpha: f64 = 1.0;
        for f in p.facets() {
            let d: f64 = f.normal.iter().zip(&step).map(|(a, s)| -(*a as f64) * s).sum();
            if d < 0.0 {
                alpha = alpha.min(0.99 * f.eval(&mu) / -d);
            }
        }
        let obj = |m: &[f64]| guillemin_symplectic(p, m) - x.iter().zip(m).map(|(a, b)| a * b).sum::<f64>();
        let f0 = obj(&mu);
        let mut next: Vec<f64>;
        loop {
            next = mu.iter().zip(&step).map(|(m, s)| m - alpha * s).collect();
            if p.contains_interior(&next) && (obj(&next) <= f0 || alpha < 1e-10) {
                break;
            }
            alpha *= 0.5;
        }
        let stalled = next.iter().zip(&mu).all(|(a, b)| (a - b).abs() <= 8.0 * f64::EPSILON * b.abs().max(1.0));
        mu = next;
        if stalled || !p.contains_interior(&mu) {
            break;
        }
    }
    if !p.contains_interior(&mu) {
        return Err(fail(iters));
    }

    // Pass 2: Newton in the chart of the nearest vertex.
    let vertex = best_vertex(p, &mu);
    let chart = Chart::new(p, vertex);
    let y: Vec<f64> = chart.ainv.transpose().mul_vec(x);
    let psi = |s: &[f64]| {
        let l = chart.facet_values(s);
        symplectic_from_l(&l) - y.iter().zip(s).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut s: Vec<f64> = chart.tight.iter().map(|&j| p.facets()[j].eval(&mu).max(f64::MIN_POSITIVE)).collect();
    for it in 0..NEWTON_MAX_ITER {
        let l = chart.facet_values(&s);
        if l.iter().any(|v| !(*v > 0.0)) {
            return Err(fail(iters + it));
        }
        if residual(&l) <= tol {
            return Ok(LegendrePoint { mu: chart.mu(&s), l, vertex });
        }
        let mut gs: Vec<f64> = y.iter().map(|v| -v).collect();
        let mut k = Matrix::zeros(n);
        for (cj, &lj) in chart.c.iter().zip(&l) {
            let w = 0.5 * (libm::log(lj) + 1.0);
            for a in 0..n {
                gs[a] += w * cj[a];
                for b in 0..n {
                    k[(a, b)] += 0.5 * cj[a] * cj[b] / lj;
                }
            }
        }
        let sc: Vec<f64> = s.iter().map(|v| libm::sqrt(2.0 * v)).collect();
        let m = Matrix::from_fn(n, |a, b| sc[a] * k[(a, b)] * sc[b]);
        let rhs: Vec<f64> = gs.iter().zip(&sc).map(|(g, c)| -g * c).collect();
        let Some(w) = m.solve(&rhs) else { return Err(fail(iters + it)) };
        let ds: Vec<f64> = w.iter().zip(&sc).map(|(a, b)| a * b).collect();
        let mut alpha: f64 = 1.0;
        for (cj, &lj) in chart.c.iter().zip(&l) {
            let dl: f64 = cj.iter().zip(&ds).map(|(a, b)| a * b).sum();
            if dl < 0.0 {
                alpha = alpha.min(0.99 * lj / -dl);
            }
        }
        let f0 = psi(&s);
        let mut next: Vec<f64>;
        loop {
            next = s.iter().zip(&ds).map(|(a, b)| a + alpha * b).collect();
            let ok = chart.facet_values(&next).iter().all(|v| *v > 0.0);
            if ok && (psi(&next) <= f0 + 1e-15 * f0.abs().max(1.0) || alpha < 1e-10) {
                break;
            }
            alpha *= 0.5;
        }
        s = next;
    }
    Err(fail(iters + NEWTON_MAX_ITER))
}

/// `μ` with `∇g(μ) = x`; see [`guillemin_solve`].
pub fn guillemin_moment(p: &Polytope, x: &[f64], start: &[f64]) -> Result<Vec<f64>, GeometryError> {
    guillemin_solve(p, x, start).map(|s| s.mu)
}

/// Jets of `μ(x)` around `x0 = ∇g(μ0)`, from the chord iteration in chart
/// variables `η ← η + K(s0)^{-1} (A^{-T}(x0 + h) - ∇_s g(s0 + η))`, which
/// gains one order per step.
pub(crate) fn guillemin_jets<'a>(alg: &'a JetAlgebra, p: &Polytope, x0: &[f64], pt: &LegendrePoint) -> Result<(Vec<Jet<'a>>, f64), GeometryError> {
    let n = p.dim();
    let chart = Chart::new(p, pt.vertex);
    let s0: Vec<f64> = chart.tight.iter().map(|&j| pt.l[j]).collect();
    let l0 = &pt.l;
    let mut k = Matrix::zeros(n);
    for (cj, &lj) in chart.c.iter().zip(l0) {
        for a in 0..n {
            for b in 0..n {
                k[(a, b)] += 0.5 * cj[a] * cj[b] / lj;
            }
        }
    }
    let sc: Vec<f64> = s0.iter().map(|v| libm::sqrt(2.0 * v)).collect();
    let m = Matrix::from_fn(n, |a, b| sc[a] * k[(a, b)] * sc[b]);
    let minv = m.inverse().ok_or(GeometryError::NewtonFailed { x: x0.to_vec(), iterations: 0 })?;
    // K^{-1} = S M^{-1} S.
    let kinv = Matrix::from_fn(n, |a, b| sc[a] * minv[(a, b)] * sc[b]);
    let at = chart.ainv.transpose();
    let target: Vec<Jet<'a>> = (0..n)
        .map(|a| {
            let mut t = alg.constant(0.0);
            for b in 0..n {
                t = t.axpy(at[(a, b)], &alg.variable(b, x0[b]));
            }
            t
        })
        .collect();
    let mut eta: Vec<Jet<'a>> = (0..n).map(|_| alg.constant(0.0)).collect();
    for _ in 0..=alg.degree() + 1 {
        let mut grad: Vec<Jet<'a>> = (0..n).map(|_| alg.constant(0.0)).collect();
        for (cj, &lj) in chart.c.iter().zip(l0) {
            let mut l = alg.constant(lj);
            for (c, e) in cj.iter().zip(&eta) {
                if *c != 0.0 {
                    l = l.axpy(*c, e);
                }
            }
            let w = l.ln().add_const(1.0).scale(0.5);
            for (g, c) in grad.iter_mut().zip(cj) {
                if *c != 0.0 {
                    *g = g.axpy(*c, &w);
                }
            }
        }
        let resid: Vec<Jet<'a>> = target.iter().zip(&grad).map(|(t, g)| t.sub(g)).collect();
        for a in 0..n {
            let mut upd = eta[a].clone();
            for b in 0..n {
                upd = upd.axpy(kinv[(a, b)], &resid[b]);
            }
            eta[a] = upd;
        }
    }
    // μ = v + A^{-1}(s0 + η), with the constant part taken from the solve.
    let mu: Vec<Jet<'a>> = (0..n)
        .map(|i| {
            let mut m = alg.constant(pt.mu[i]);
            for a in 0..n {
                m = m.axpy(chart.ainv[(i, a)], &eta[a]);
            }
            m
        })
        .collect();
    let l_final: Vec<f64> = chart.facet_values(&s0.iter().zip(&eta).map(|(a, e)| a + e.value()).collect::<Vec<_>>());
    let mu_val: Vec<f64> = mu.iter().map(Jet::value).collect();
    let value = 2.0 * (x0.iter().zip(&mu_val).map(|(a, b)| a * b).sum::<f64>() - symplectic_from_l(&l_final));
    Ok((mu, value))
}
