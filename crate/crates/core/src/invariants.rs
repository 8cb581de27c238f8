//! The holomorphic invariants `𝓕_k(X, ω)` for torus-generated fields, and the
//! two statements about them: `𝓕_k = (k+1)𝓕_0` and
//! `dE_k(φ_t)/dt = 𝓕_k / V` along the flow of `Re X`.
//!
//! A field is given by `v ∈ ℝⁿ`; its real part generates `x ↦ x + t v`, and
//! its potential is `θ = ⟨v, ∇Ψ⟩ + const` for the metric with potential `Ψ`.
//! The Laplacian is the trace `Δθ ωⁿ = n √-1∂∂̄θ ∧ ω^{n-1}`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::functionals::{Check, Evaluator, FunctionalError, Node, Sampler, Scenario};
use crate::geometry::{wedge_density, FormMatrix, Perturbation, PotentialSpec, ToricGeometry};
use crate::linalg::Matrix;
use crate::quad::IntegralValue;

#[derive(Debug, Clone, PartialEq)]
pub struct ToricField {
    pub v: Vec<f64>,
    /// Additive constant in `θ`.
    pub constant: f64,
}

impl ToricField {
    pub fn new(v: Vec<f64>) -> Self {
        Self { v, constant: 0.0 }
    }
}

/// Which metric of the scenario the invariant is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    Reference,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValues {
    /// `𝓕_k` for `k = 0..=n`.
    pub values: Vec<IntegralValue>,
    pub volume: IntegralValue,
}

impl InvariantValues {
    pub fn futaki(&self) -> IntegralValue {
        self.values[0]
    }
}

/// `θ`, and the matrix of `√-1∂∂̄θ`, at `x` for the potential `spec`.
pub fn theta_of_field(spec: &PotentialSpec, field: &ToricField, x: &[f64]) -> Result<(f64, FormMatrix), FunctionalError> {
    let geo = ToricGeometry::new(spec.reference.clone())?;
    let rp = geo.ref_point_from_x(x)?;
    let psi = rp.potential.add(&geo.perturbation_jet(spec.perturbation.as_ref(), &rp)?);
    let n = geo.dim();
    check_field(field, n)?;
    let grad = psi.gradient();
    let theta = dot(&field.v, &grad) + field.constant;
    let mut m = Matrix::zeros(n);
    for (l, vl) in field.v.iter().enumerate() {
        let dg = Matrix::from_fn(n, |i, j| {
            let mut e = vec![0u8; n];
            e[i] += 1;
            e[j] += 1;
            e[l] += 1;
            0.5 * psi.partial(&e)
        });
        m = &m + &dg.scale(*vl);
    }
    Ok((theta, m))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_field(field: &ToricField, n: usize) -> Result<(), FunctionalError> {
    if field.v.len() != n {
        return Err(crate::geometry::GeometryError::DimensionMismatch { expected: n, got: field.v.len() }.into());
    }
    Ok(())
}

fn wedge(factors: &[(&FormMatrix, usize)]) -> Result<f64, FunctionalError> {
    Ok(wedge_density(factors)?)
}

impl Sampler<'_> {
    fn invariant(&self, field: &ToricField, which: MetricChoice, k: usize) -> Result<f64, FunctionalError> {
        let n = self.dim();
        self.integral(|nd: &Node<'_>| {
            let (g, r, grad, dg) = match which {
                MetricChoice::Reference => (&nd.g, &nd.r, &nd.grad_ref, &nd.dg_ref),
                MetricChoice::Perturbed => (&nd.g_phi, &nd.r_phi, &nd.grad_phi, &nd.dg_phi),
            };
            let theta = dot(&field.v, grad) + field.constant;
            let mut ddtheta = Matrix::zeros(n);
            for (vl, d) in field.v.iter().zip(dg) {
                ddtheta = &ddtheta + &d.scale(*vl);
            }
            let ginv = g.inverse().ok_or(crate::geometry::GeometryError::NonPositiveMetric { x: nd.x.clone() })?;
            let lap = (&ginv * &ddtheta).trace();
            let nk = (n - k) as f64;
            let mut d = (k + 1) as f64 * lap * wedge(&[(r, k), (g, n - k)])?;
            if k < n {
                d += nk * theta * (wedge(&[(g, n)])? - wedge(&[(r, k + 1), (g, n - k - 1)])?);
            }
            Ok(d)
        })
    }
}

impl Evaluator<'_> {
    pub fn invariants(&self, field: &ToricField, which: MetricChoice) -> Result<InvariantValues, FunctionalError> {
        let n = self.dim();
        check_field(field, n)?;
        let values = (0..=n).map(|k| self.pair(|s| s.invariant(field, which, k))).collect::<Result<_, _>>()?;
        Ok(InvariantValues { values, volume: self.volume() })
    }
}

pub fn compute_invariants(s: &Scenario, field: &ToricField, which: MetricChoice) -> Result<InvariantValues, FunctionalError> {
    let geo = ToricGeometry::new(s.reference.clone())?;
    Evaluator::new(&geo, s)?.invariants(field, which)
}

/// `|𝓕_k - (k+1)𝓕_0|` for `k = 1..=n`, with tolerance
/// `max(rel · |𝓕_0|, abs)`.
pub fn check_theorem3(iv: &InvariantValues, rel: f64, abs: f64) -> Vec<Check> {
    let f0 = iv.futaki();
    (1..iv.values.len())
        .map(|k| {
            let rhs = f0.scale((k + 1) as f64);
            Check::new("theorem3", vec![("k".into(), format!("{k}"))], iv.values[k], rhs, (rel * f0.value.abs()).max(abs))
        })
        .collect()
}

/// Richardson-extrapolated central difference of `E_k(φ_t)` at `t = 0`,
/// where `φ_t = Φ(x + t v) - Φ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDerivative {
    pub k: usize,
    pub derivative: IntegralValue,
    /// `𝓕_k / V` on the reference.
    pub invariant_over_volume: IntegralValue,
    pub check: Check,
}

pub fn check_prop32(s: &Scenario, field: &ToricField, ks: &[usize], t_step: f64) -> Result<Vec<FlowDerivative>, FunctionalError> {
    let n = s.dim();
    check_field(field, n)?;
    if let Some(&k) = ks.iter().find(|&&k| k > n) {
        return Err(FunctionalError::OrderOutOfRange { check: "prop32", k, n });
    }
    let geo = ToricGeometry::new(s.reference.clone())?;
    let base = Evaluator::new(&geo, &s.with_perturbation(None))?;
    let inv = base.invariants(field, MetricChoice::Reference)?;
    let volume = base.volume().value;
    let energies = |t: f64| -> Result<Vec<IntegralValue>, FunctionalError> {
        let sc = s.with_perturbation(Some(Perturbation::Translation { v: field.v.clone(), t }));
        let v = Evaluator::new(&geo, &sc)?.functionals()?;
        Ok(v.orders.iter().map(|o| o.e).collect())
    };
    let h = t_step;
    let [ep, em, ehp, ehm] = [h, -h, h / 2.0, -h / 2.0].map(energies);
    let (ep, em, ehp, ehm) = (ep?, em?, ehp?, ehm?);
    let mut out = Vec::new();
    for &k in ks {
        let d1 = (ep[k].value - em[k].value) / (2.0 * h);
        let d2 = (ehp[k].value - ehm[k].value) / h;
        let value = (4.0 * d2 - d1) / 3.0;
        let err = (4.0 * (ehp[k].error_estimate + ehm[k].error_estimate) / h
            + (ep[k].error_estimate + em[k].error_estimate) / (2.0 * h))
            / 3.0
            + (d2 - d1).abs() / 15.0;
        let derivative = IntegralValue { value, error_estimate: err };
        let target = inv.values[k].scale(1.0 / volume);
        let tol = 1e-4 * target.value.abs().max(1.0);
        let params = vec![("k".into(), format!("{k}")), ("t_step".into(), format!("{h}"))];
        let check = Check::new("prop32", params, derivative, target, tol);
        out.push(FlowDerivative { k, derivative, invariant_over_volume: target, check });
    }
    Ok(out)
}

/// Differences `𝓕_k(θ + 1) - 𝓕_k(θ)`, which vanish in the class `2πc₁`.
pub fn gauge_shift(ev: &Evaluator<'_>, field: &ToricField, which: MetricChoice) -> Result<Vec<IntegralValue>, FunctionalError> {
    let shifted = ToricField { v: field.v.clone(), constant: field.constant + 1.0 };
    let a = ev.invariants(field, which)?;
    let b = ev.invariants(&shifted, which)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| IntegralValue { value: y.value - x.value, error_estimate: x.error_estimate + y.error_estimate }).collect())
}

pub fn field_label(field: &ToricField) -> String {
    let parts: Vec<String> = field.v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(","))
}
