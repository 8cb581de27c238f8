//! Check reports and value tables, serialized as JSON or CSV.
//!
//! Output is a pure function of the rows: maps are ordered, floats use the
//! shortest round-trip representation, and nothing depends on time or
//! environment.

use std::collections::BTreeMap;
use std::io::Write;

use ekverify_core::functionals::{Check, FunctionalValues};
use ekverify_core::invariants::InvariantValues;
use ekverify_core::quad::IntegralValue;
use serde::Serialize;

/// Conventions every numeric value in a report is computed under.
pub fn conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("coordinates", "x_i = log|z_i|; integrals over M are (2π)^n ∫ dx"),
        ("metric", "G = ½ D²Φ, moment map μ = ½ ∇Φ, ωⁿ density n!·det G"),
        ("ricci", "Ric = -½ D² log det D²Φ; reference Ricci potential normalized by (1/V)∫e^h ωⁿ = 1"),
        ("fubini_study", "Φ = (n+1) log(1 + Σ e^{2x_i}), volume (2π)ⁿ(n+1)ⁿ"),
        ("guillemin", "symplectic potential ½ Σ ℓ_i log ℓ_i, Legendre-dual to Φ"),
        ("perturbation", "φ = ε f(μ_ref(x))"),
        ("laplacian", "Δθ ωⁿ = n √-1∂∂̄θ ∧ ω^{n-1} (trace, no ½)"),
        ("field_potential", "θ = ⟨v, ∇Φ⟩; Re X generates x ↦ x + t v"),
        ("gradient_form", "√-1∂u∧∂̄u has matrix ½ ∇u ∇uᵀ"),
        ("quadrature", "Gauss–Legendre; error_estimate = |I(N) - I(N/2)| (+ path-rule error)"),
        ("status", "inconclusive when error_estimate ≥ tolerance and the residual is not decisive"),
    ])
}

/// A reported value: a float, or an exact rational / certificate string.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Exact(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Real(x) => format!("{x:e}"),
            Value::Exact(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub params: BTreeMap<String, String>,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    pub tolerance: f64,
    pub error_estimate: f64,
    pub pass: bool,
    pub status: String,
}

impl ReportRow {
    /// A row from a numeric residual check; `value` is the residual.
    pub fn from_check(c: &Check, scenario: Option<&str>) -> Self {
        Self {
            check: c.name.clone(),
            scenario: scenario.map(str::to_string),
            params: c.params.iter().cloned().collect(),
            value: Value::Real(c.residual),
            lhs: Some(c.lhs),
            rhs: Some(c.rhs),
            tolerance: c.tolerance,
            error_estimate: c.error_estimate,
            pass: c.passed(),
            status: c.status().as_str().to_string(),
        }
    }

    /// A row from an exact check, which has no tolerance and no error.
    pub fn exact(check: &str, params: &[(&str, String)], value: String, pass: bool) -> Self {
        Self {
            check: check.to_string(),
            scenario: None,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            value: Value::Exact(value),
            lhs: None,
            rhs: None,
            tolerance: 0.0,
            error_estimate: 0.0,
            pass,
            status: if pass { "pass" } else { "fail" }.to_string(),
        }
    }

    pub fn with_param(mut self, key: &str, value: String) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let mut s = format!("{:<12} {}", self.status, self.check);
        if let Some(id) = &self.scenario {
            s.push_str(&format!(" [{id}]"));
        }
        if !self.params.is_empty() {
            s.push_str(&format!(" {}", self.params_string()));
        }
        s.push_str(&format!(" value={}", self.value.render()));
        if matches!(self.value, Value::Real(_)) {
            s.push_str(&format!(" tol={:e} err={:e}", self.tolerance, self.error_estimate));
        }
        s
    }
}

/// Values of one order `k` of one scenario, with the toric invariant when
/// a field was given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueRow {
    pub scenario: String,
    pub k: usize,
    pub volume: f64,
    pub r: f64,
    pub e0_mabuchi: f64,
    pub e_zero: f64,
    pub e_zero_err: f64,
    pub j: f64,
    pub j_err: f64,
    pub e: f64,
    pub e_err: f64,
    pub f: f64,
    pub f_err: f64,
    pub c: f64,
    pub c_err: f64,
    pub field: Option<String>,
    pub invariant: Option<f64>,
    pub invariant_err: Option<f64>,
}

pub fn value_rows(scenario: &str, v: &FunctionalValues, inv: Option<(&str, &InvariantValues)>) -> Vec<ValueRow> {
    v.orders
        .iter()
        .map(|o| {
            let iv: Option<IntegralValue> = inv.map(|(_, i)| i.values[o.k]);
            ValueRow {
                scenario: scenario.to_string(),
                k: o.k,
                volume: v.volume.value,
                r: v.r.value,
                e0_mabuchi: v.e0_mabuchi.value,
                e_zero: o.e_zero.value,
                e_zero_err: o.e_zero.error_estimate,
                j: o.j.value,
                j_err: o.j.error_estimate,
                e: o.e.value,
                e_err: o.e.error_estimate,
                f: o.f.value,
                f_err: o.f.error_estimate,
                c: o.c.value,
                c_err: o.c.error_estimate,
                field: inv.map(|(label, _)| label.to_string()),
                invariant: iv.map(|x| x.value),
                invariant_err: iv.map(|x| x.error_estimate),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub conventions: BTreeMap<&'static str, &'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<ValueRow>,
}

impl Default for Report {
    fn default() -> Self {
        Self { conventions: conventions(), checks: Vec::new(), values: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|r| r.pass)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => self.write_json(out),
            Format::Csv => self.write_csv(out),
        }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// Conventions as `#` comment lines, then one row per check, then (after
    /// a blank line) one row per value row.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.conventions {
            writeln!(out, "# {k}: {v}")?;
        }
        if !self.checks.is_empty() || self.values.is_empty() {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["check", "scenario", "params", "value", "lhs", "rhs", "tolerance", "error_estimate", "pass", "status"])?;
            for r in &self.checks {
                let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
                w.write_record([
                    r.check.clone(),
                    r.scenario.clone().unwrap_or_default(),
                    r.params_string(),
                    r.value.render(),
                    opt(r.lhs),
                    opt(r.rhs),
                    format!("{:e}", r.tolerance),
                    format!("{:e}", r.error_estimate),
                    r.pass.to_string(),
                    r.status.clone(),
                ])?;
            }
            w.flush()?;
        }
        if !self.values.is_empty() {
            if !self.checks.is_empty() {
                writeln!(out)?;
            }
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &self.values {
                w.serialize(r).map_err(std::io::Error::other)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::default();
        r.checks.push(ReportRow::exact("identity", &[("name", "a1".into()), ("k", "3".into())], "equal".into(), true));
        let iv = |v| IntegralValue { value: v, error_estimate: 1e-12 };
        let c = Check::new("theorem1", vec![("k".into(), "1".into())], iv(0.5), iv(0.5 + 1e-10), 1e-6);
        r.checks.push(ReportRow::from_check(&c, Some("cp1")));
        r
    }

    #[test]
    fn json_has_schema_fields() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let row = &v["checks"][1];
        for key in ["check", "params", "value", "tolerance", "error_estimate", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
        assert_eq!(row["params"]["k"], "1");
        assert_eq!(v["checks"][0]["value"], "equal");
        assert!(v["conventions"]["laplacian"].as_str().unwrap().contains("trace"));
    }

    #[test]
    fn csv_one_row_per_check() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), 3);
        assert!(body[0].starts_with("check,scenario,params"));
        assert!(body[2].starts_with("theorem1,cp1,k=1,"));
    }

    #[test]
    fn output_is_stable() {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        sample().write_json(&mut a).unwrap();
        sample().write_json(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(!sample().checks.is_empty() && sample().all_passed());
    }
}
