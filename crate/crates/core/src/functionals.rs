//! The energy functionals `E_k⁰`, `J_k`, `E_k`, `F_k`, `c_k` and the K-energy
//! on a scenario, and the identities relating them, as residual checks.
//!
//! Every integral is evaluated twice, on the scenario grid and on the grid
//! with half as many nodes per axis; the difference is the reported error.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::{wedge_density, FormMatrix, GeometryError, Perturbation, Reference, ToricGeometry};
use crate::jet::{jet_det, Jet};
use crate::linalg::Matrix;
use crate::quad::{box_rule, path_integrate_many, polytope_rule, CompensatedSum, Domain, GridSpec, IntegralValue, QuadError};

/// A reference metric, a perturbation `φ`, the quadrature grid and the
/// orders `k` of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub reference: Reference,
    pub perturbation: Option<Perturbation>,
    pub grid: GridSpec,
    pub k_list: Vec<usize>,
}

impl Scenario {
    pub fn new(reference: Reference, perturbation: Option<Perturbation>) -> Self {
        let n = reference.dim();
        Self { reference, perturbation, grid: GridSpec::default_for(n), k_list: (0..=n).collect() }
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn with_perturbation(&self, perturbation: Option<Perturbation>) -> Self {
        Self { perturbation, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), FunctionalError> {
        self.grid.validate()?;
        let n = self.dim();
        if let Some(&k) = self.k_list.iter().find(|&&k| k > n) {
            return Err(FunctionalError::OrderOutOfRange { check: "k_list", k, n });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalError {
    Geometry(GeometryError),
    Quad(QuadError),
    PathNotPositive { t: f64, x: Vec<f64> },
    OrderOutOfRange { check: &'static str, k: usize, n: usize },
    ReferenceMismatch,
}

impl fmt::Display for FunctionalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Geometry(e) => write!(f, "{e}"),
            Self::Quad(e) => write!(f, "{e}"),
            Self::PathNotPositive { t, x } => write!(f, "metric along the path is not positive at t = {t}, x = {x:?}"),
            Self::OrderOutOfRange { check, k, n } => write!(f, "{check}: order {k} is out of range for dimension {n}"),
            Self::ReferenceMismatch => write!(f, "scenarios use different reference metrics"),
        }
    }
}

impl core::error::Error for FunctionalError {}

impl From<GeometryError> for FunctionalError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl From<QuadError> for FunctionalError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Geometry(g) => Self::Geometry(g),
            other => Self::Quad(other),
        }
    }
}

/// Parameterization `s(t)` of the path `s(t)·φ` from 0 to `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathShape {
    Linear,
    Quadratic,
}

impl PathShape {
    fn s(self, t: f64) -> f64 {
        match self {
            Self::Linear => t,
            Self::Quadratic => t * t,
        }
    }

    fn ds(self, t: f64) -> f64 {
        match self {
            Self::Linear => 1.0,
            Self::Quadratic => 2.0 * t,
        }
    }
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn wedge(factors: &[(&FormMatrix, usize)]) -> Result<f64, FunctionalError> {
    Ok(wedge_density(factors)?)
}

/// Everything the functionals need at one quadrature node.
pub(crate) struct Node<'g> {
    /// Weight against `dx`, including `(2π)ⁿ`.
    pub w: f64,
    pub x: Vec<f64>,
    pub g: FormMatrix,
    pub r: FormMatrix,
    pub g_phi: FormMatrix,
    pub r_phi: FormMatrix,
    pub h_raw: f64,
    /// `u` before subtracting the normalizing constant of `h_ω`.
    pub u_raw: f64,
    pub log_ratio: f64,
    pub phi: f64,
    pub grad_u: Vec<f64>,
    /// Matrix of `√-1∂∂̄u`, from the jets of `u`.
    pub u_mat: FormMatrix,
    /// Matrix of `√-1∂∂̄φ`.
    pub dphi: FormMatrix,
    hess_ref: Vec<Jet<'g>>,
    hess_phi: Vec<Jet<'g>>,
    /// `∂_l G` for the reference and for the perturbed metric.
    pub dg_ref: Vec<FormMatrix>,
    pub dg_phi: Vec<FormMatrix>,
    pub grad_ref: Vec<f64>,
    pub grad_phi: Vec<f64>,
}

fn third_derivative_matrices(psi: &Jet<'_>, n: usize) -> Vec<FormMatrix> {
    (0..n)
        .map(|l| {
            Matrix::from_fn(n, |i, j| {
                let mut e = vec![0u8; n];
                e[i] += 1;
                e[j] += 1;
                e[l] += 1;
                0.5 * psi.partial(&e)
            })
        })
        .collect()
}

fn hessian_jets<'g>(geo: &'g ToricGeometry, psi: &Jet<'_>) -> Vec<Jet<'g>> {
    let n = geo.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let di = psi.diff(i);
        for j in 0..n {
            out.push(geo.algebra2().truncate(&di.diff(j)));
        }
    }
    out
}

/// Node data for one quadrature rule.
pub(crate) struct Sampler<'g> {
    pub geo: &'g ToricGeometry,
    pub nodes: Vec<Node<'g>>,
    pub volume: f64,
    /// Constant added to the raw Ricci potential of the reference.
    pub h_const: f64,
}

impl<'g> Sampler<'g> {
    pub fn new(geo: &'g ToricGeometry, pert: Option<&Perturbation>, grid: &GridSpec, nodes_per_axis: usize) -> Result<Self, FunctionalError> {
        let n = geo.dim();
        let two_pi_n = libm::pow(2.0 * PI, n as f64);
        let rule = match grid.domain {
            Domain::Moment => polytope_rule(geo.polytope(), nodes_per_axis),
            Domain::Box => box_rule(n, grid.half_width, nodes_per_axis),
        };
        let mut nodes = Vec::with_capacity(rule.len());
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let rp = match grid.domain {
                Domain::Moment => geo.ref_point_from_mu(p)?,
                Domain::Box => geo.ref_point_from_x(p)?,
            };
            let x = rp.x.clone();
            let m_ref = geo.metric(&rp.potential, &x)?;
            let phi = geo.perturbation_jet(pert, &rp)?;
            let psi = rp.potential.add(&phi);
            let m_phi = geo.metric(&psi, &x)?;
            let h_raw = geo.ricci_potential_raw(&rp, &m_ref);
            let phi2 = geo.algebra2().truncate(&phi);
            let u = m_phi.log_det.sub(&m_ref.log_det).add(&phi2).sub(&h_raw);
            let uh = u.hessian();
            let ph = phi2.hessian();
            let weight = match grid.domain {
                Domain::Moment => w * two_pi_n / m_ref.g.det(),
                Domain::Box => w * two_pi_n,
            };
            nodes.push(Node {
                w: weight,
                u_raw: u.value(),
                log_ratio: m_phi.log_det.value() - m_ref.log_det.value(),
                phi: phi.value(),
                grad_u: u.gradient(),
                u_mat: Matrix::from_fn(n, |i, j| 0.5 * uh[i * n + j]),
                dphi: Matrix::from_fn(n, |i, j| 0.5 * ph[i * n + j]),
                h_raw: h_raw.value(),
                hess_ref: hessian_jets(geo, &rp.potential),
                hess_phi: hessian_jets(geo, &phi),
                dg_ref: third_derivative_matrices(&rp.potential, n),
                dg_phi: third_derivative_matrices(&psi, n),
                grad_ref: rp.potential.gradient(),
                grad_phi: psi.gradient(),
                g: m_ref.g,
                r: m_ref.ric,
                g_phi: m_phi.g,
                r_phi: m_phi.ric,
                x,
            });
        }
        let mut s = Self { geo, nodes, volume: 0.0, h_const: 0.0 };
        s.volume = s.integral(|nd| wedge(&[(&nd.g, n)]))?;
        if let Reference::Guillemin(_) = geo.reference() {
            let z = s.integral(|nd| Ok(libm::exp(nd.h_raw) * wedge(&[(&nd.g, n)])?))?;
            s.h_const = libm::log(s.volume / z);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.geo.dim()
    }

    /// `∫_M f` for a density `f` against `dx` (the `(2π)ⁿ` is in the weights).
    pub fn integral(&self, mut f: impl FnMut(&Node<'g>) -> Result<f64, FunctionalError>) -> Result<f64, FunctionalError> {
        let mut acc = CompensatedSum::default();
        for nd in &self.nodes {
            let v = f(nd)?;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { at: nd.x.clone() }.into());
            }
            acc.add(nd.w * v);
        }
        Ok(acc.value())
    }

    pub fn average(&self, f: impl FnMut(&Node<'g>) -> Result<f64, FunctionalError>) -> Result<f64, FunctionalError> {
        Ok(self.integral(f)? / self.volume)
    }

    pub fn h(&self, nd: &Node<'_>) -> f64 {
        nd.h_raw + self.h_const
    }

    pub fn u(&self, nd: &Node<'_>) -> f64 {
        nd.u_raw - self.h_const
    }

    pub fn average_scalar_curvature(&self) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| Ok(n as f64 * wedge(&[(&nd.r, 1), (&nd.g, n - 1)])?))
    }

    pub fn e_zero(&self, k: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| {
            let h = self.h(nd);
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..=k {
                a += wedge(&[(&nd.r_phi, i), (&nd.g, k - i), (&nd.g_phi, n - k)])?;
                if h != 0.0 {
                    b += wedge(&[(&nd.r, i), (&nd.g, k - i), (&nd.g, n - k)])?;
                }
            }
            Ok((nd.log_ratio - h) * a + h * b)
        })
    }

    /// `(1/V)∫ h (-√-1∂∂̄h)^k ∧ ω^{n-k}` with `-√-1∂∂̄h = ω - Ric`.
    fn h_term(&self, nd: &Node<'_>, k: usize) -> Result<f64, FunctionalError> {
        let h = self.h(nd);
        if h == 0.0 {
            return Ok(0.0);
        }
        let n = self.dim();
        Ok(h * wedge(&[(&(&nd.g - &nd.r), k), (&nd.g, n - k)])?)
    }

    pub fn f(&self, k: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| Ok(self.u(nd) * wedge(&[(&nd.u_mat, k), (&nd.g_phi, n - k)])? + self.h_term(nd, k)?))
    }

    pub fn c(&self, k: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| {
            let h = self.h(nd);
            if h == 0.0 {
                return Ok(0.0);
            }
            let gr = &nd.g - &nd.r;
            let mut acc = 0.0;
            for i in 0..k {
                acc += sign(k - i) * binom(k + 1, i) * wedge(&[(&gr, k - i), (&nd.g, n - k + i)])?;
            }
            Ok(h * acc)
        })
    }

    /// Right side of `E_k - E_{k-1} - E_0 = ...`.
    pub fn c2_rhs(&self, k: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| {
            let a = wedge(&[(&nd.r_phi, k), (&nd.g_phi, n - k)])? - wedge(&[(&nd.g_phi, n)])?;
            let h = self.h(nd);
            let b = if h == 0.0 { 0.0 } else { wedge(&[(&nd.r, k), (&nd.g, n - k)])? - wedge(&[(&nd.g, n)])? };
            Ok(self.u(nd) * a + h * b)
        })
    }

    /// `(1/V)∫ √-1∂u∧∂̄u ∧ (√-1∂∂̄u)^{j} ∧ ω_φ^{n-1-j}`.
    pub fn gradient_term(&self, j: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.average(|nd| {
            let du = Matrix::outer(&nd.grad_u, 0.5);
            wedge(&[(&du, 1), (&nd.u_mat, j), (&nd.g_phi, n - 1 - j)])
        })
    }

    /// `J_k` for `k = 0..=n` and the K-energy along `s(t)·φ`, with the
    /// path-rule error estimates. `r` is the average scalar curvature.
    pub fn path_functionals(&self, shape: PathShape, t_nodes: usize, r: f64) -> Result<Vec<IntegralValue>, FunctionalError> {
        let n = self.dim();
        let a2 = self.geo.algebra2();
        let mut failure = None;
        let vals = path_integrate_many(
            |t| {
                let s = shape.s(t);
                let ds = shape.ds(t);
                let mut acc = vec![CompensatedSum::default(); n + 2];
                for nd in &self.nodes {
                    let gt = &nd.g + &nd.dphi.scale(s);
                    if gt.cholesky().is_none() {
                        failure = Some(FunctionalError::PathNotPositive { t, x: nd.x.clone() });
                        return Err(QuadError::InvalidGrid);
                    }
                    let top = wedge(&[(&gt, n)]).map_err(|_| QuadError::InvalidGrid)?;
                    let lead = ds * nd.phi * nd.w / self.volume;
                    for (k, slot) in acc.iter_mut().enumerate().take(n) {
                        let mixed = wedge(&[(&nd.g, k + 1), (&gt, n - k - 1)]).map_err(|_| QuadError::InvalidGrid)?;
                        slot.add(-((n - k) as f64) * lead * (top - mixed));
                    }
                    let hess: Vec<Jet<'_>> = nd.hess_ref.iter().zip(&nd.hess_phi).map(|(a, b)| a.axpy(s, b)).collect();
                    let lt = a2.truncate(&jet_det(&hess, n)).ln();
                    let lh = lt.hessian();
                    let rt = Matrix::from_fn(n, |i, j| -0.5 * lh[i * n + j]);
                    let scal = n as f64 * wedge(&[(&rt, 1), (&gt, n - 1)]).map_err(|_| QuadError::InvalidGrid)?;
                    acc[n + 1].add(-lead * (scal - r * top));
                }
                Ok(acc.iter().map(CompensatedSum::value).collect())
            },
            n + 2,
            t_nodes,
        );
        match (vals, failure) {
            (_, Some(e)) => Err(e),
            (Ok(v), None) => Ok(v),
            (Err(e), None) => Err(e.into()),
        }
    }

    /// Smallest eigenvalue of `Ric_φ` relative to `ω_φ` over the nodes.
    pub fn min_ricci_eigenvalue(&self) -> f64 {
        self.nodes.iter().filter_map(|nd| nd.r_phi.min_generalized_eigenvalue(&nd.g_phi)).fold(f64::INFINITY, f64::min)
    }

    /// Constant `c_φ` normalizing `h_φ = -u + c_φ`, and the residual
    /// `(1/V)∫(e^{h_φ} - 1)ω_φⁿ`.
    pub fn perturbed_ricci_constant(&self) -> Result<(f64, f64), FunctionalError> {
        let n = self.dim();
        let z = self.average(|nd| Ok(libm::exp(-self.u(nd)) * wedge(&[(&nd.g_phi, n)])?))?;
        let c = -libm::log(z);
        let res = self.average(|nd| Ok(libm::expm1(c - self.u(nd)) * wedge(&[(&nd.g_phi, n)])?))?;
        Ok((c, res))
    }
}

/// Paired fine and coarse samplers for one scenario.
pub struct Evaluator<'g> {
    pub(crate) fine: Sampler<'g>,
    pub(crate) coarse: Sampler<'g>,
    t_nodes: usize,
}

/// Values of one order `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderValues {
    pub k: usize,
    pub e_zero: IntegralValue,
    pub j: IntegralValue,
    pub e: IntegralValue,
    pub f: IntegralValue,
    pub c: IntegralValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalValues {
    pub n: usize,
    pub volume: IntegralValue,
    /// Average scalar curvature of the reference.
    pub r: IntegralValue,
    pub e0_mabuchi: IntegralValue,
    /// Indexed by `k = 0..=n`.
    pub orders: Vec<OrderValues>,
}

impl FunctionalValues {
    pub fn order(&self, k: usize) -> &OrderValues {
        &self.orders[k]
    }

    fn e(&self, k: usize) -> IntegralValue {
        self.orders[k].e
    }

    fn f(&self, k: usize) -> IntegralValue {
        self.orders[k].f
    }
}

/// Linear combination of values; errors add in absolute value.
fn combine(terms: &[(f64, IntegralValue)]) -> IntegralValue {
    let mut v = CompensatedSum::default();
    let mut e = 0.0;
    for (c, t) in terms {
        v.add(c * t.value);
        e += c.abs() * t.error_estimate;
    }
    IntegralValue { value: v.value(), error_estimate: e }
}

fn sub(a: IntegralValue, b: IntegralValue) -> IntegralValue {
    combine(&[(1.0, a), (-1.0, b)])
}

impl<'g> Evaluator<'g> {
    pub fn new(geo: &'g ToricGeometry, s: &Scenario) -> Result<Self, FunctionalError> {
        s.validate()?;
        if geo.reference() != &s.reference {
            return Err(FunctionalError::ReferenceMismatch);
        }
        let pert = s.perturbation.as_ref();
        let fine = Sampler::new(geo, pert, &s.grid, s.grid.nodes_per_axis)?;
        let coarse = Sampler::new(geo, pert, &s.grid, s.grid.nodes_per_axis / 2)?;
        Ok(Self { fine, coarse, t_nodes: s.grid.t_nodes })
    }

    pub fn dim(&self) -> usize {
        self.fine.dim()
    }

    pub(crate) fn pair(&self, f: impl Fn(&Sampler<'g>) -> Result<f64, FunctionalError>) -> Result<IntegralValue, FunctionalError> {
        Ok(IntegralValue::new(f(&self.fine)?, f(&self.coarse)?))
    }

    pub fn volume(&self) -> IntegralValue {
        IntegralValue::new(self.fine.volume, self.coarse.volume)
    }

    pub fn average_scalar_curvature(&self) -> Result<IntegralValue, FunctionalError> {
        self.pair(Sampler::average_scalar_curvature)
    }

    /// `J_0..J_n` and the K-energy along the given path.
    pub fn path_values(&self, shape: PathShape) -> Result<(Vec<IntegralValue>, IntegralValue), FunctionalError> {
        let rf = self.fine.average_scalar_curvature()?;
        let rc = self.coarse.average_scalar_curvature()?;
        let fine = self.fine.path_functionals(shape, self.t_nodes, rf)?;
        let coarse = self.coarse.path_functionals(shape, self.t_nodes, rc)?;
        let mut out: Vec<IntegralValue> = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| IntegralValue { value: a.value, error_estimate: (a.value - b.value).abs() + a.error_estimate })
            .collect();
        let mabuchi = out.pop().unwrap_or(IntegralValue::zero());
        Ok((out, mabuchi))
    }

    pub fn functionals(&self) -> Result<FunctionalValues, FunctionalError> {
        let n = self.dim();
        let (j, e0_mabuchi) = self.path_values(PathShape::Linear)?;
        let mut orders = Vec::with_capacity(n + 1);
        for (k, jk) in j.iter().enumerate() {
            let e_zero = self.pair(|s| s.e_zero(k))?;
            orders.push(OrderValues {
                k,
                e_zero,
                j: *jk,
                e: sub(e_zero, *jk),
                f: self.pair(|s| s.f(k))?,
                c: self.pair(|s| s.c(k))?,
            });
        }
        Ok(FunctionalValues { n, volume: self.volume(), r: self.average_scalar_curvature()?, e0_mabuchi, orders })
    }

    /// `(c_φ, residual)` for the Ricci potential of `ω_φ`.
    pub fn perturbed_ricci_potential(&self) -> Result<(f64, IntegralValue), FunctionalError> {
        let (c, res) = self.fine.perturbed_ricci_constant()?;
        let (_, res_coarse) = self.coarse.perturbed_ricci_constant()?;
        Ok((c, IntegralValue::new(res, res_coarse)))
    }

    /// Reference Ricci-potential normalization residual `(1/V)∫(e^h - 1)ωⁿ`.
    pub fn reference_ricci_residual(&self) -> Result<IntegralValue, FunctionalError> {
        let n = self.dim();
        self.pair(|s| s.average(|nd| Ok(libm::expm1(s.h(nd)) * wedge(&[(&nd.g, n)])?)))
    }

    /// Max over nodes of `|Ric - ω|` for the reference.
    pub fn einstein_residual(&self) -> f64 {
        self.fine.nodes.iter().map(|nd| (&nd.r - &nd.g).max_abs()).fold(0.0, f64::max)
    }

    /// Max over nodes of `|√-1∂∂̄u - (ω_φ - Ric_φ)|`.
    pub fn u_hessian_residual(&self) -> f64 {
        self.fine.nodes.iter().map(|nd| (&nd.u_mat - &(&nd.g_phi - &nd.r_phi)).max_abs()).fold(0.0, f64::max)
    }

    pub fn min_ricci_eigenvalue(&self) -> f64 {
        self.fine.min_ricci_eigenvalue().min(self.coarse.min_ricci_eigenvalue())
    }
}

pub fn compute_functionals(s: &Scenario) -> Result<FunctionalValues, FunctionalError> {
    let geo = ToricGeometry::new(s.reference.clone())?;
    Evaluator::new(&geo, s)?.functionals()
}

/// Checks that `ω_φ` is positive on a coarse moment-polytope rule with
/// `nodes_per_axis` points per simplex axis; the error names the node.
pub fn probe_positivity(s: &Scenario, nodes_per_axis: usize) -> Result<(), FunctionalError> {
    let geo = ToricGeometry::new(s.reference.clone())?;
    let grid = GridSpec { domain: Domain::Moment, ..s.grid };
    Sampler::new(&geo, s.perturbation.as_ref(), &grid, nodes_per_axis).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The quadrature error estimate is not below the tolerance.
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// One residual check: `|lhs - rhs| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub error_estimate: f64,
}

impl Check {
    pub fn new(name: &str, params: Vec<(String, String)>, lhs: IntegralValue, rhs: IntegralValue, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            params,
            lhs: lhs.value,
            rhs: rhs.value,
            residual: (lhs.value - rhs.value).abs(),
            tolerance,
            error_estimate: lhs.error_estimate + rhs.error_estimate,
        }
    }

    /// A check of `value ≥ -tolerance` (`lhs = value`, `rhs = 0`), used for
    /// inequalities; `residual` is the shortfall below zero.
    pub fn lower_bound(name: &str, params: Vec<(String, String)>, value: IntegralValue, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            params,
            lhs: value.value,
            rhs: 0.0,
            residual: (-value.value).max(0.0),
            tolerance,
            error_estimate: value.error_estimate,
        }
    }

    pub fn status(&self) -> Status {
        if !(self.residual.is_finite() && self.error_estimate < self.tolerance) {
            if self.residual.is_finite() && self.residual > self.tolerance + self.error_estimate {
                return Status::Fail;
            }
            return Status::Inconclusive;
        }
        if self.residual <= self.tolerance {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }
}

fn k_param(k: usize) -> Vec<(String, String)> {
    vec![("k".into(), format!("{k}"))]
}

fn relative(v: f64) -> f64 {
    1e-6 * v.abs().max(1.0)
}

/// `Σ_{i=0}^k (-1)^i C(k+1, i+1) E_i = F_k`.
pub fn check_theorem1(v: &FunctionalValues, k: usize) -> Result<Check, FunctionalError> {
    if k == 0 || k > v.n {
        return Err(FunctionalError::OrderOutOfRange { check: "theorem1", k, n: v.n });
    }
    let terms: Vec<(f64, IntegralValue)> = (0..=k).map(|i| (sign(i) * binom(k + 1, i + 1), v.e(i))).collect();
    let f = v.f(k);
    Ok(Check::new("theorem1", k_param(k), combine(&terms), f, relative(f.value)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corollary {
    C1 { p: usize, k: usize },
    C2 { k: usize },
    C3 { k: usize },
    T1Rec { k: usize },
}

impl Corollary {
    pub fn name(&self) -> &'static str {
        match self {
            Self::C1 { .. } => "c1",
            Self::C2 { .. } => "c2",
            Self::C3 { .. } => "c3",
            Self::T1Rec { .. } => "t1rec",
        }
    }
}

/// Residual of one corollary instance. `c2_rhs` is the independently
/// integrated right side of C2 (see [`Evaluator::c2_rhs`]).
pub fn check_corollary(v: &FunctionalValues, which: Corollary, c2_rhs: Option<IntegralValue>) -> Result<Check, FunctionalError> {
    let n = v.n;
    let out_of_range = |k| FunctionalError::OrderOutOfRange { check: which.name(), k, n };
    match which {
        Corollary::C1 { p, k } => {
            if k < 2 || p > k - 2 || k > n {
                return Err(out_of_range(k));
            }
            let lhs: Vec<_> = (p..=k).map(|i| (sign(i) * binom(k - p, i - p), v.e(i))).collect();
            let rhs: Vec<_> = (0..=p + 1).map(|i| (sign(i) * binom(p + 1, i), v.f(k - i))).collect();
            let lhs = combine(&lhs);
            let params = vec![("p".into(), format!("{p}")), ("k".into(), format!("{k}"))];
            Ok(Check::new("c1", params, lhs, combine(&rhs), relative(lhs.value)))
        }
        Corollary::C2 { k } => {
            if k == 0 || k > n {
                return Err(out_of_range(k));
            }
            let lhs = combine(&[(1.0, v.e(k)), (-1.0, v.e(k - 1)), (-1.0, v.e(0))]);
            let rhs = c2_rhs.ok_or(out_of_range(k))?;
            Ok(Check::new("c2", k_param(k), lhs, rhs, relative(lhs.value)))
        }
        Corollary::C3 { k } => {
            if k == 0 || k > n {
                return Err(out_of_range(k));
            }
            let mut rhs: Vec<_> = (0..k).map(|i| (sign(k - i) * binom(k + 1, i), v.f(k - i))).collect();
            rhs.push(((k + 1) as f64, v.e(0)));
            let lhs = v.e(k);
            Ok(Check::new("c3", k_param(k), lhs, combine(&rhs), relative(lhs.value)))
        }
        Corollary::T1Rec { k } => {
            if k == 0 || k > n {
                return Err(out_of_range(k));
            }
            let lhs = sub(v.e(k), v.e(k - 1));
            let mut rhs: Vec<_> = (0..k).map(|i| (sign(k - i) * binom(k, i), v.f(k - i))).collect();
            rhs.push((1.0, v.e(0)));
            Ok(Check::new("t1rec", k_param(k), lhs, combine(&rhs), relative(lhs.value)))
        }
    }
}

impl Evaluator<'_> {
    pub fn c2_rhs(&self, k: usize) -> Result<IntegralValue, FunctionalError> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(FunctionalError::OrderOutOfRange { check: "c2", k, n });
        }
        self.pair(|s| s.c2_rhs(k))
    }

    /// `D_1 = 2E_0 - E_1 + (1/V)∫√-1∂u∧∂̄u∧ω_φ^{n-1}` and, for `n ≥ 2`,
    /// `D_2 = 3E_0 - 3E_1 + E_2 + (1/V)∫√-1∂u∧∂̄u∧√-1∂∂̄u∧ω_φ^{n-2}`.
    pub fn pali_constants(&self, v: &FunctionalValues) -> Result<(IntegralValue, Option<IntegralValue>), FunctionalError> {
        let g1 = self.pair(|s| s.gradient_term(0))?;
        let d1 = combine(&[(2.0, v.e(0)), (-1.0, v.e(1)), (1.0, g1)]);
        let d2 = if v.n >= 2 {
            let g2 = self.pair(|s| s.gradient_term(1))?;
            Some(combine(&[(3.0, v.e(0)), (-3.0, v.e(1)), (1.0, v.e(2)), (1.0, g2)]))
        } else {
            None
        };
        Ok((d1, d2))
    }
}

/// Spreads `|D_i(φ_a) - D_i(φ_b)|` of the constants in Pali's formula.
#[derive(Debug, Clone, PartialEq)]
pub struct PaliOutcome {
    pub d1: (IntegralValue, IntegralValue),
    pub d2: Option<(IntegralValue, IntegralValue)>,
    pub checks: Vec<Check>,
}

pub fn check_pali_remark(a: &Scenario, b: &Scenario) -> Result<PaliOutcome, FunctionalError> {
    if a.reference != b.reference {
        return Err(FunctionalError::ReferenceMismatch);
    }
    let geo = ToricGeometry::new(a.reference.clone())?;
    let ea = Evaluator::new(&geo, a)?;
    let eb = Evaluator::new(&geo, b)?;
    let (a1, a2) = ea.pali_constants(&ea.functionals()?)?;
    let (b1, b2) = eb.pali_constants(&eb.functionals()?)?;
    let mut checks = vec![Check::new("pali_c1_spread", Vec::new(), a1, b1, 1e-6)];
    let d2 = a2.zip(b2);
    if let Some((x, y)) = d2 {
        checks.push(Check::new("pali_c2_spread", Vec::new(), x, y, 1e-6));
    }
    Ok(PaliOutcome { d1: (a1, b1), d2, checks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Outcome {
    pub k: usize,
    pub min_eigenvalue: f64,
    pub bound: f64,
    pub ricci_bound_ok: bool,
    /// `E_k - (k+1)E_0 - c_k`.
    pub margin: IntegralValue,
    /// Present only when the curvature hypothesis holds.
    pub check: Option<Check>,
}

pub fn check_theorem2(ev: &Evaluator<'_>, v: &FunctionalValues, k: usize) -> Result<Theorem2Outcome, FunctionalError> {
    if k < 2 || k > v.n {
        return Err(FunctionalError::OrderOutOfRange { check: "theorem2", k, n: v.n });
    }
    let bound = -2.0 / (k - 1) as f64;
    let min_eigenvalue = ev.min_ricci_eigenvalue();
    let ricci_bound_ok = min_eigenvalue >= bound;
    let margin = combine(&[(1.0, v.e(k)), (-((k + 1) as f64), v.e(0)), (-1.0, v.orders[k].c)]);
    let check = ricci_bound_ok.then(|| Check::lower_bound("theorem2", k_param(k), margin, relative(v.e(k).value)));
    Ok(Theorem2Outcome { k, min_eigenvalue, bound, ricci_bound_ok, margin, check })
}

/// `E_0` from the family against the K-energy formula, and `J_k`, `E_0`
/// along `tφ` against `t²φ`.
pub fn check_path_independence(ev: &Evaluator<'_>, v: &FunctionalValues) -> Result<Vec<Check>, FunctionalError> {
    let mut out = vec![Check::new("e0_family_vs_mabuchi", Vec::new(), v.e(0), v.e0_mabuchi, 1e-6)];
    let (jq, mq) = ev.path_values(PathShape::Quadratic)?;
    for (k, j) in jq.iter().enumerate() {
        let jl = v.orders[k].j;
        out.push(Check::new("j_path_independence", k_param(k), jl, *j, relative(jl.value)));
    }
    out.push(Check::new("mabuchi_path_independence", Vec::new(), v.e0_mabuchi, mq, relative(v.e0_mabuchi.value)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(3, 0), 1.0);
        assert_eq!(binom(2, 3), 0.0);
    }

    #[test]
    fn status_tristate() {
        let iv = |v, e| IntegralValue { value: v, error_estimate: e };
        assert_eq!(Check::new("x", Vec::new(), iv(1.0, 1e-9), iv(1.0, 0.0), 1e-6).status(), Status::Pass);
        assert_eq!(Check::new("x", Vec::new(), iv(1.1, 1e-9), iv(1.0, 0.0), 1e-6).status(), Status::Fail);
        assert_eq!(Check::new("x", Vec::new(), iv(1.0, 1e-5), iv(1.0, 0.0), 1e-6).status(), Status::Inconclusive);
    }
}
