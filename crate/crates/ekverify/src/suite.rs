//! Runs exact and numeric checks and collects them as report rows.

use ekverify_core::exactpoly::rat;
use ekverify_core::functionals::{
    check_corollary, check_path_independence, check_pali_remark, check_theorem1, check_theorem2, Check, Corollary, Evaluator,
    FunctionalError, FunctionalValues,
};
use ekverify_core::geometry::{Reference, ToricGeometry};
use ekverify_core::identities::{appendix_report, claim3_verify, remark_asymptotic, theorem2_coefficients, verify_identity, IdentityName};
use ekverify_core::invariants::{check_prop32, check_theorem3, field_label, InvariantValues, MetricChoice, ToricField};
use ekverify_core::quad::IntegralValue;

use crate::report::{value_rows, ReportRow, Value, ValueRow};
use crate::scenario::LoadedScenario;

/// Tolerance on calibration quantities.
pub const CALIBRATION_TOL: f64 = 1e-8;
/// Relative tolerance of `𝓕_k = (k+1)𝓕_0`.
pub const THEOREM3_REL: f64 = 1e-3;
/// Absolute floor of the same check, as a multiple of the volume.
pub const THEOREM3_ABS_PER_VOLUME: f64 = 2e-6;
/// Relative tolerance of `𝓕_k(ω) = 𝓕_k(ω_φ)`.
pub const METRIC_INDEPENDENCE_REL: f64 = 1e-4;
pub const DEFAULT_T_STEP: f64 = 1e-3;

fn rows(checks: &[Check], id: &str) -> Vec<ReportRow> {
    checks.iter().map(|c| ReportRow::from_check(c, Some(id))).collect()
}

/// The symbolic identities for `1 ≤ k ≤ max_k`, the positivity lemma for
/// `1 ≤ m ≤ max_m`, the Ricci-bound coefficients, the `(y, ε)`
/// certificate and the remark limit.
pub fn exact_rows(max_k: u32, max_m: u32) -> Vec<ReportRow> {
    let mut out = Vec::new();
    for name in IdentityName::ALL {
        for k in 1..=max_k {
            let c = verify_identity(name, k).expect("k >= 1");
            let value = match &c.counterexample {
                None => "equal".to_string(),
                Some(((i, j), l, r)) => format!("differs at x^{i} y^{j}: {l} vs {r}"),
            };
            out.push(ReportRow::exact("identity", &[("name", name.tag().to_string()), ("k", k.to_string())], value, c.pass));
        }
    }
    for m in 1..=max_m {
        let r = appendix_report(m);
        let claim5 = match r.claim5_pass {
            Some(b) => b.to_string(),
            None => "n/a".to_string(),
        };
        let value = format!(
            "nonneg={};penultimate_zero={};claim1={} ({} pairs);claim5={claim5}",
            r.all_nonneg, r.penultimate_zero, r.claim1_pass, r.claim1_pairs
        );
        let pass = r.all_nonneg && r.penultimate_zero && r.claim1_pass && r.claim5_pass.unwrap_or(true);
        out.push(ReportRow::exact("appendix", &[("m", m.to_string())], value, pass));
    }
    for k in 2..=max_k {
        let t = theorem2_coefficients(k).expect("k >= 2");
        let value = t.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        out.push(ReportRow::exact("theorem2_coefficients", &[("k", k.to_string())], value, t.all_nonneg && t.reconstruction_ok));
    }
    let c3 = claim3_verify();
    let roots = c3.coefficients.iter().map(|c| c.roots_in_open_interval.to_string()).collect::<Vec<_>>().join(",");
    let value = format!("expansion_matches={};roots_in_(1/2,1]={roots};spot_checks={}", c3.expansion_matches, c3.spot_checks);
    out.push(ReportRow::exact("claim3", &[], value, c3.pass));
    let rv = remark_asymptotic();
    let pass = rv.exact_limit == rat(-57, 625) && rv.displayed_form_agrees;
    out.push(ReportRow::exact("remark_limit", &[], rv.exact_limit.to_string(), pass));
    for (m, v) in &rv.finite_m_values {
        out.push(ReportRow::exact("remark_value", &[("m", m.to_string())], v.to_string(), rv.displayed_form_agrees));
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Volume against `n!(2π)ⁿ vol(Δ)`, the Einstein residual of a Fubini–Study
/// reference, and the normalization of the Ricci potentials.
pub fn calibrate(ls: &LoadedScenario) -> Result<Vec<ReportRow>, FunctionalError> {
    let s = &ls.scenario;
    let geo = ToricGeometry::new(s.reference.clone())?;
    let ev = Evaluator::new(&geo, s)?;
    let n = s.dim();
    let exact = factorial(n) * (2.0 * std::f64::consts::PI).powi(n as i32) * geo.polytope().volume();
    let exact_iv = IntegralValue { value: exact, error_estimate: 0.0 };
    let mut checks = vec![Check::new("volume", Vec::new(), ev.volume(), exact_iv, CALIBRATION_TOL * exact)];
    if matches!(s.reference, Reference::FubiniStudy(_)) {
        let res = IntegralValue { value: ev.einstein_residual(), error_estimate: 0.0 };
        checks.push(Check::new("einstein_residual", Vec::new(), res, IntegralValue::zero(), CALIBRATION_TOL));
    }
    checks.push(Check::new("h_normalization", Vec::new(), ev.reference_ricci_residual()?, IntegralValue::zero(), CALIBRATION_TOL));
    if s.perturbation.is_some() {
        let (_, res) = ev.perturbed_ricci_potential()?;
        checks.push(Check::new("u_normalization", Vec::new(), res, IntegralValue::zero(), CALIBRATION_TOL));
    }
    Ok(rows(&checks, &ls.id))
}

/// Functional values of a scenario, computed once and shared by the checks.
pub struct Computed<'g> {
    pub ev: Evaluator<'g>,
    pub values: FunctionalValues,
}

pub fn compute<'g>(geo: &'g ToricGeometry, ls: &LoadedScenario) -> Result<Computed<'g>, FunctionalError> {
    let ev = Evaluator::new(geo, &ls.scenario)?;
    let values = ev.functionals()?;
    Ok(Computed { ev, values })
}

fn default_orders(ls: &LoadedScenario, min: usize) -> Vec<usize> {
    ls.scenario.k_list.iter().copied().filter(|&k| k >= min).collect()
}

pub fn theorem1(c: &Computed<'_>, ls: &LoadedScenario, ks: Option<&[usize]>) -> Result<Vec<ReportRow>, FunctionalError> {
    let ks = ks.map(<[usize]>::to_vec).unwrap_or_else(|| default_orders(ls, 1));
    let checks = ks.iter().map(|&k| check_theorem1(&c.values, k)).collect::<Result<Vec<_>, _>>()?;
    Ok(rows(&checks, &ls.id))
}

/// Every admissible corollary instance of dimension `n`.
pub fn all_corollaries(n: usize) -> Vec<Corollary> {
    let mut out = Vec::new();
    for k in 2..=n {
        for p in 0..=k - 2 {
            out.push(Corollary::C1 { p, k });
        }
    }
    for k in 1..=n {
        out.push(Corollary::C2 { k });
        out.push(Corollary::C3 { k });
        out.push(Corollary::T1Rec { k });
    }
    out
}

pub fn corollaries(c: &Computed<'_>, ls: &LoadedScenario, which: &[Corollary]) -> Result<Vec<ReportRow>, FunctionalError> {
    let mut checks = Vec::new();
    for &w in which {
        let rhs = match w {
            Corollary::C2 { k } => Some(c.ev.c2_rhs(k)?),
            _ => None,
        };
        checks.push(check_corollary(&c.values, w, rhs)?);
    }
    Ok(rows(&checks, &ls.id))
}

/// Spreads of the constants between two scenarios on the same reference,
/// and on a Fubini–Study reference their vanishing.
pub fn pali(a: &LoadedScenario, b: &LoadedScenario) -> Result<Vec<ReportRow>, FunctionalError> {
    let outcome = check_pali_remark(&a.scenario, &b.scenario)?;
    let id = format!("{}|{}", a.id, b.id);
    let mut out = rows(&outcome.checks, &id);
    if matches!(a.scenario.reference, Reference::FubiniStudy(_)) {
        let mut vanish = Vec::new();
        for (label, (x, y)) in [("c1", outcome.d1)].into_iter().chain(outcome.d2.map(|d| ("c2", d))) {
            for (side, v) in [(&a.id, x), (&b.id, y)] {
                let params = vec![("constant".to_string(), label.to_string()), ("scenario".to_string(), side.clone())];
                vanish.push(Check::new("pali_constant_fs", params, v, IntegralValue::zero(), 1e-6));
            }
        }
        out.extend(rows(&vanish, &id));
    }
    Ok(out)
}

/// The inequality where the eigenvalue gate holds; otherwise a `gated` row
/// recording the smallest eigenvalue, which asserts nothing.
pub fn theorem2(c: &Computed<'_>, ls: &LoadedScenario, ks: Option<&[usize]>) -> Result<Vec<ReportRow>, FunctionalError> {
    let ks = ks.map(<[usize]>::to_vec).unwrap_or_else(|| default_orders(ls, 2));
    let mut out = Vec::new();
    for k in ks {
        let t = check_theorem2(&c.ev, &c.values, k)?;
        match &t.check {
            Some(check) => out.push(
                ReportRow::from_check(check, Some(&ls.id))
                    .with_param("min_eigenvalue", format!("{:e}", t.min_eigenvalue))
                    .with_param("bound", format!("{:e}", t.bound)),
            ),
            None => out.push(ReportRow {
                check: "theorem2".into(),
                scenario: Some(ls.id.clone()),
                params: [("k".to_string(), k.to_string()), ("bound".to_string(), format!("{:e}", t.bound))].into(),
                value: Value::Real(t.min_eigenvalue),
                lhs: Some(t.margin.value),
                rhs: None,
                tolerance: 0.0,
                error_estimate: t.margin.error_estimate,
                pass: true,
                status: "gated".into(),
            }),
        }
    }
    Ok(out)
}

pub fn kenergy(c: &Computed<'_>, ls: &LoadedScenario) -> Result<Vec<ReportRow>, FunctionalError> {
    Ok(rows(&check_path_independence(&c.ev, &c.values)?, &ls.id))
}

pub fn field_of(ls: &LoadedScenario, v: Option<&[f64]>) -> Option<ToricField> {
    v.map(<[f64]>::to_vec).or_else(|| ls.field.clone()).map(ToricField::new)
}

/// `𝓕_k = (k+1)𝓕_0` on the reference, the normalized invariants, and
/// metric independence when the scenario has a perturbation.
pub fn theorem3(c: &Computed<'_>, ls: &LoadedScenario, field: &ToricField) -> Result<Vec<ReportRow>, FunctionalError> {
    let iv = c.ev.invariants(field, MetricChoice::Reference)?;
    let volume = iv.volume.value;
    let label = field_label(field);
    let mut checks = check_theorem3(&iv, THEOREM3_REL, THEOREM3_ABS_PER_VOLUME * volume);
    if ls.scenario.perturbation.is_some() {
        let ip = c.ev.invariants(field, MetricChoice::Perturbed)?;
        for (k, (a, b)) in iv.values.iter().zip(&ip.values).enumerate() {
            let tol = (METRIC_INDEPENDENCE_REL * a.value.abs()).max(THEOREM3_ABS_PER_VOLUME * volume);
            checks.push(Check::new("metric_independence", vec![("k".into(), k.to_string())], *a, *b, tol));
        }
    }
    let mut out: Vec<ReportRow> = rows(&checks, &ls.id).into_iter().map(|r| r.with_param("v", label.clone())).collect();
    out.extend(invariant_rows(&iv, ls, &label));
    Ok(out)
}

/// `𝓕_k / V`, informational.
fn invariant_rows(iv: &InvariantValues, ls: &LoadedScenario, label: &str) -> Vec<ReportRow> {
    let v = iv.volume.value;
    iv.values
        .iter()
        .enumerate()
        .map(|(k, x)| ReportRow {
            check: "invariant_over_volume".into(),
            scenario: Some(ls.id.clone()),
            params: [("k".to_string(), k.to_string()), ("v".to_string(), label.to_string())].into(),
            value: Value::Real(x.value / v),
            lhs: None,
            rhs: None,
            tolerance: 0.0,
            error_estimate: x.error_estimate / v,
            pass: true,
            status: "value".into(),
        })
        .collect()
}

pub fn prop32(ls: &LoadedScenario, field: &ToricField, ks: Option<&[usize]>, t_step: f64) -> Result<Vec<ReportRow>, FunctionalError> {
    let ks = ks.map(<[usize]>::to_vec).unwrap_or_else(|| ls.scenario.k_list.clone());
    let label = field_label(field);
    let out = check_prop32(&ls.scenario, field, &ks, t_step)?;
    Ok(out.iter().map(|d| ReportRow::from_check(&d.check, Some(&ls.id)).with_param("v", label.clone())).collect())
}

/// Value rows for `compute`, with the invariants when a field is given.
pub fn value_table(c: &Computed<'_>, ls: &LoadedScenario, field: Option<&ToricField>) -> Result<Vec<ValueRow>, FunctionalError> {
    match field {
        Some(f) => {
            let iv = c.ev.invariants(f, MetricChoice::Perturbed)?;
            Ok(value_rows(&ls.id, &c.values, Some((&field_label(f), &iv))))
        }
        None => Ok(value_rows(&ls.id, &c.values, None)),
    }
}

/// Every applicable numeric check of one scenario.
pub fn full_scenario(ls: &LoadedScenario) -> Result<Vec<ReportRow>, FunctionalError> {
    let geo = ToricGeometry::new(ls.scenario.reference.clone())?;
    let c = compute(&geo, ls)?;
    let mut out = calibrate(ls)?;
    out.extend(theorem1(&c, ls, None)?);
    out.extend(corollaries(&c, ls, &all_corollaries(ls.scenario.dim()))?);
    out.extend(theorem2(&c, ls, None)?);
    out.extend(kenergy(&c, ls)?);
    if let Some(field) = field_of(ls, None) {
        out.extend(theorem3(&c, ls, &field)?);
        out.extend(prop32(ls, &field, None, DEFAULT_T_STEP)?);
    }
    Ok(out)
}
