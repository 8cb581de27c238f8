//! Torus-invariant Kähler geometry in logarithmic coordinates `x_i = log|z_i|`.
//!
//! Conventions: for a potential `Φ`, the form `√-1∂∂̄Φ` has coefficient
//! matrix `G = ½ D²Φ`, the moment map is `μ = ½ ∇Φ`, the Ricci form has
//! matrix `R = -½ D² log det D²Φ`, and `∫_M F = (2π)ⁿ ∫_{ℝⁿ} F dx` for
//! torus-invariant top-degree densities `F`. With these, the Fubini–Study
//! potential `(n+1) log(1 + Σ e^{2x_i})` lies in the class 2πc₁.

mod polytope;
mod reference;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use polytope::{Facet, Polytope};
pub use reference::{
    guillemin_gradient, guillemin_moment, guillemin_solve, guillemin_symplectic, LegendrePoint, NEWTON_MAX_ITER, NEWTON_TOL,
};

use crate::expr::Expr;
use crate::jet::{jet_det, Jet, JetAlgebra};
use crate::linalg::Matrix;

/// Coefficient matrix of a torus-invariant real (1,1)-form.
pub type FormMatrix = Matrix;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    InvalidPolytope(String),
    NotDelzant { vertex: Vec<f64>, reason: &'static str },
    /// No translate of the polytope is reflexive, so the metric is not in 2πc₁.
    NotAnticanonical,
    NewtonFailed { x: Vec<f64>, iterations: usize },
    OutsidePolytope { mu: Vec<f64> },
    NonPositiveMetric { x: Vec<f64> },
    NonFinite { x: Vec<f64> },
    WedgeExponents { sum: usize, n: usize },
    DimensionMismatch { expected: usize, got: usize },
    BadPerturbation(String),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidPolytope(m) => write!(f, "invalid polytope: {m}"),
            Self::NotDelzant { vertex, reason } => write!(f, "not Delzant at vertex {vertex:?}: {reason}"),
            Self::NotAnticanonical => write!(f, "polytope is not a translate of a reflexive polytope (class is not 2πc₁)"),
            Self::NewtonFailed { x, iterations } => write!(f, "Legendre Newton solve failed at x = {x:?} after {iterations} iterations"),
            Self::OutsidePolytope { mu } => write!(f, "moment point {mu:?} is not interior to the polytope"),
            Self::NonPositiveMetric { x } => write!(f, "metric is not positive definite at x = {x:?}"),
            Self::NonFinite { x } => write!(f, "non-finite value at x = {x:?}"),
            Self::WedgeExponents { sum, n } => write!(f, "wedge exponents sum to {sum}, expected {n}"),
            Self::DimensionMismatch { expected, got } => write!(f, "dimension mismatch: expected {expected}, got {got}"),
            Self::BadPerturbation(m) => write!(f, "bad perturbation: {m}"),
        }
    }
}

impl core::error::Error for GeometryError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Fubini–Study on ℂPⁿ.
    FubiniStudy(usize),
    /// Guillemin potential `g = ½ Σ ℓ_i log ℓ_i` of a Delzant polytope.
    Guillemin(Polytope),
}

impl Reference {
    pub fn dim(&self) -> usize {
        match self {
            Self::FubiniStudy(n) => *n,
            Self::Guillemin(p) => p.dim(),
        }
    }

    pub fn polytope(&self) -> Polytope {
        match self {
            Self::FubiniStudy(n) => Polytope::projective_space(*n),
            Self::Guillemin(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `φ = ε f(μ_ref(x))`, with `f` over the variables `mu1..mun`.
    Moment { f: Expr, eps: f64 },
    /// `φ = Φ_ref(x + t v) - Φ_ref(x)`, the pull-back under the torus flow.
    Translation { v: Vec<f64>, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub reference: Reference,
    pub perturbation: Option<Perturbation>,
}

/// Symmetric partial derivatives of a scalar field at a point, orders 0..=4.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivTensor {
    n: usize,
    entries: Vec<(Vec<u8>, f64)>,
}

impl DerivTensor {
    pub fn from_jet(j: &Jet<'_>) -> Self {
        let alg = j.algebra();
        let entries = (0..alg.len()).map(|i| (alg.monomial(i).to_vec(), j.partial(alg.monomial(i)))).collect();
        Self { n: alg.vars(), entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `∂_{i1} ∂_{i2} ... f`, in any index order; zero past the stored order.
    pub fn partial(&self, indices: &[usize]) -> f64 {
        let mut e = vec![0u8; self.n];
        for &i in indices {
            e[i] += 1;
        }
        self.entries.iter().find(|(m, _)| *m == e).map_or(0.0, |(_, v)| *v)
    }
}

/// Reference data at one point: moment map, its jets, and the potential jet.
#[derive(Debug, Clone)]
pub struct RefPoint<'a> {
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
    pub mu_jets: Vec<Jet<'a>>,
    pub potential: Jet<'a>,
}

/// Metric data of a potential at one point.
#[derive(Debug, Clone)]
pub struct MetricPoint<'a> {
    pub g: FormMatrix,
    pub ric: FormMatrix,
    /// Degree-2 jet of `log det D²Φ`.
    pub log_det: Jet<'a>,
}

impl MetricPoint<'_> {
    /// Density of `ωⁿ` against `dx`, before the `(2π)ⁿ` factor.
    pub fn volume_density(&self) -> f64 {
        let n = self.g.dim();
        factorial(n) * self.g.det()
    }
}

/// Shared machinery for one reference metric.
#[derive(Debug, Clone)]
pub struct ToricGeometry {
    reference: Reference,
    polytope: Polytope,
    center: Vec<f64>,
    a4: JetAlgebra,
    a2: JetAlgebra,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl ToricGeometry {
    pub fn new(reference: Reference) -> Result<Self, GeometryError> {
        let n = reference.dim();
        if n == 0 {
            return Err(GeometryError::InvalidPolytope("dimension must be positive".into()));
        }
        let polytope = reference.polytope();
        let center = polytope.anticanonical_center().ok_or(GeometryError::NotAnticanonical)?;
        Ok(Self { reference, polytope, center, a4: JetAlgebra::new(n, 4), a2: JetAlgebra::new(n, 2) })
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn reference(&self) -> &Reference {
        &self.reference
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    /// The point `c` with `⟨a_i, c⟩ = 1 - b_i`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn algebra(&self) -> &JetAlgebra {
        &self.a4
    }

    pub fn algebra2(&self) -> &JetAlgebra {
        &self.a2
    }

    fn check_dim(&self, v: &[f64]) -> Result<(), GeometryError> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(GeometryError::DimensionMismatch { expected: self.dim(), got: v.len() })
        }
    }

    /// Reference data at the point whose moment image is `mu`.
    pub fn ref_point_from_mu(&self, mu: &[f64]) -> Result<RefPoint<'_>, GeometryError> {
        self.check_dim(mu)?;
        if !self.polytope.contains_interior(mu) {
            return Err(GeometryError::OutsidePolytope { mu: mu.to_vec() });
        }
        match &self.reference {
            Reference::FubiniStudy(_) => self.ref_point_from_x(&reference::fubini_study_x(mu)),
            Reference::Guillemin(p) => {
                let pt = LegendrePoint::from_mu(p, mu);
                let x = guillemin_gradient(p, mu);
                self.guillemin_point(p, x, pt)
            }
        }
    }

    pub fn ref_point_from_x(&self, x: &[f64]) -> Result<RefPoint<'_>, GeometryError> {
        self.ref_point_from_x_near(x, None)
    }

    /// As [`Self::ref_point_from_x`], warm-starting the Legendre solve at
    /// `start` when given.
    pub fn ref_point_from_x_near(&self, x: &[f64], start: Option<&[f64]>) -> Result<RefPoint<'_>, GeometryError> {
        self.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { x: x.to_vec() });
        }
        match &self.reference {
            Reference::FubiniStudy(_) => {
                let (mu_jets, value) = reference::fubini_study_jets(&self.a4, x);
                let potential = reference::potential_from_moment(&self.a4, value, &mu_jets);
                let mu = mu_jets.iter().map(Jet::value).collect();
                Ok(RefPoint { x: x.to_vec(), mu, mu_jets, potential })
            }
            Reference::Guillemin(p) => {
                let bary = p.barycenter();
                let start = start.filter(|s| p.contains_interior(s)).unwrap_or(&bary);
                let pt = guillemin_solve(p, x, start)?;
                self.guillemin_point(p, x.to_vec(), pt)
            }
        }
    }

    fn guillemin_point(&self, p: &Polytope, x: Vec<f64>, pt: LegendrePoint) -> Result<RefPoint<'_>, GeometryError> {
        let (mu_jets, value) = reference::guillemin_jets(&self.a4, p, &x, &pt)?;
        let mu = pt.mu;
        let potential = reference::potential_from_moment(&self.a4, value, &mu_jets);
        if !potential.is_finite() {
            return Err(GeometryError::NonFinite { x });
        }
        Ok(RefPoint { x, mu, mu_jets, potential })
    }

    /// Order-4 jet of the perturbation `φ` at the reference point.
    pub fn perturbation_jet<'a>(&'a self, pert: Option<&Perturbation>, rp: &RefPoint<'a>) -> Result<Jet<'a>, GeometryError> {
        match pert {
            None => Ok(self.a4.constant(0.0)),
            Some(Perturbation::Moment { f, eps }) => {
                if f.max_var().is_some_and(|m| m >= self.dim()) {
                    return Err(GeometryError::BadPerturbation("variable index exceeds dimension".into()));
                }
                Ok(f.eval(&rp.mu_jets).scale(*eps))
            }
            Some(Perturbation::Translation { v, t }) => {
                self.check_dim(v)?;
                let shifted: Vec<f64> = rp.x.iter().zip(v).map(|(a, b)| a + t * b).collect();
                let moved = self.ref_point_from_x_near(&shifted, Some(&rp.mu))?;
                Ok(moved.potential.sub(&rp.potential))
            }
        }
    }

    /// `G`, `R` and the degree-2 jet of `log det D²Φ` for the potential jet
    /// `psi` (order 4), at the point `x` used for error reporting.
    pub fn metric<'a>(&'a self, psi: &Jet<'_>, x: &[f64]) -> Result<MetricPoint<'a>, GeometryError> {
        let n = self.dim();
        let mut hess: Vec<Jet<'a>> = Vec::with_capacity(n * n);
        for i in 0..n {
            let di = psi.diff(i);
            for j in 0..n {
                hess.push(self.a2.truncate(&di.diff(j)));
            }
        }
        let g = Matrix::from_fn(n, |i, j| 0.5 * hess[i * n + j].value());
        if !g.is_finite() {
            return Err(GeometryError::NonFinite { x: x.to_vec() });
        }
        if g.cholesky().is_none() {
            return Err(GeometryError::NonPositiveMetric { x: x.to_vec() });
        }
        let log_det = jet_det(&hess, n).ln();
        let lh = log_det.hessian();
        let ric = Matrix::from_fn(n, |i, j| -0.5 * lh[i * n + j]);
        if !ric.is_finite() {
            return Err(GeometryError::NonFinite { x: x.to_vec() });
        }
        Ok(MetricPoint { g, ric, log_det })
    }

    /// Degree-2 jet of the Ricci potential of the reference metric, without
    /// its normalizing constant: zero for Fubini–Study, otherwise
    /// `-log det D²Φ - Φ + 2⟨c, x⟩`.
    pub fn ricci_potential_raw<'a>(&'a self, rp: &RefPoint<'_>, m: &MetricPoint<'_>) -> Jet<'a> {
        match self.reference {
            Reference::FubiniStudy(_) => self.a2.constant(0.0),
            Reference::Guillemin(_) => {
                let mut h = self.a2.truncate(&m.log_det).add(&self.a2.truncate(&rp.potential)).scale(-1.0);
                for (i, c) in self.center.iter().enumerate() {
                    h = h.axpy(2.0 * c, &self.a2.variable(i, rp.x[i]));
                }
                h
            }
        }
    }
}

/// Jet of the total potential `Φ_ref + φ` at `x`.
pub fn potential_jet(spec: &PotentialSpec, x: &[f64]) -> Result<DerivTensor, GeometryError> {
    let geo = ToricGeometry::new(spec.reference.clone())?;
    let rp = geo.ref_point_from_x(x)?;
    let phi = geo.perturbation_jet(spec.perturbation.as_ref(), &rp)?;
    Ok(DerivTensor::from_jet(&rp.potential.add(&phi)))
}

/// Metric and Ricci matrices of `ω_φ` at `x`.
pub fn metric_and_ricci(spec: &PotentialSpec, x: &[f64]) -> Result<(FormMatrix, FormMatrix), GeometryError> {
    let geo = ToricGeometry::new(spec.reference.clone())?;
    let rp = geo.ref_point_from_x(x)?;
    let phi = geo.perturbation_jet(spec.perturbation.as_ref(), &rp)?;
    let m = geo.metric(&rp.potential.add(&phi), x)?;
    Ok((m.g, m.ric))
}

/// Density of `A_1^{e_1} ∧ ... ∧ A_r^{e_r}` against `dx` (before the
/// `(2π)ⁿ` factor): `n!` times the mixed discriminant, by polarization
/// `Σ_S (-1)^{n-|S|} det(Σ_{i∈S} A_i)` over the expanded factor list.
pub fn wedge_density(factors: &[(&FormMatrix, usize)]) -> Result<f64, GeometryError> {
    let n = factors.first().map_or(0, |(m, _)| m.dim());
    let sum: usize = factors.iter().map(|(_, e)| e).sum();
    if sum != n || n == 0 {
        return Err(GeometryError::WedgeExponents { sum, n });
    }
    if let Some((m, _)) = factors.iter().find(|(m, _)| m.dim() != n) {
        return Err(GeometryError::DimensionMismatch { expected: n, got: m.dim() });
    }
    let list: Vec<&FormMatrix> = factors.iter().flat_map(|(m, e)| core::iter::repeat(*m).take(*e)).collect();
    if let [a] = list.as_slice() {
        return Ok(a.det());
    }
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut s = Matrix::zeros(n);
        for (i, m) in list.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = &s + m;
            }
        }
        let sign = if (n as u32 - mask.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * s.det();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_density_examples() {
        let a = Matrix::from_rows(2, vec![2.0, 0.3, 0.3, 1.0]);
        let b = Matrix::from_rows(2, vec![1.0, -0.2, -0.2, 0.5]);
        let ab = wedge_density(&[(&a, 1), (&b, 1)]).unwrap();
        assert!((ab - ((&a + &b).det() - a.det() - b.det())).abs() < 1e-14);
        assert!((wedge_density(&[(&a, 2)]).unwrap() - 2.0 * a.det()).abs() < 1e-14);
        let r1 = Matrix::outer(&[0.7, -1.3], 0.5);
        assert!(wedge_density(&[(&r1, 2)]).unwrap().abs() < 1e-15);
        assert!(matches!(wedge_density(&[(&a, 1)]), Err(GeometryError::WedgeExponents { .. })));
    }

    #[test]
    fn fubini_study_is_einstein() {
        for n in 1..=3 {
            let geo = ToricGeometry::new(Reference::FubiniStudy(n)).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.7 * i as f64 - 0.4).collect();
            let rp = geo.ref_point_from_x(&x).unwrap();
            let m = geo.metric(&rp.potential, &x).unwrap();
            assert!((&m.ric - &m.g).max_abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn one_dimensional_hessian_at_origin() {
        // Φ = 2 log(1 + e^{2x}) has Φ'' = 2 at 0, so G = 1 and μ = 1.
        let spec = PotentialSpec { reference: Reference::FubiniStudy(1), perturbation: None };
        let d = potential_jet(&spec, &[0.0]).unwrap();
        assert!((d.partial(&[0, 0]) - 2.0).abs() < 1e-14);
        assert!((d.partial(&[0]) - 2.0).abs() < 1e-14);
    }
}
