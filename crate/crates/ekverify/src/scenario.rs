//! Versioned JSON scenario files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "id": "cp2-mu1mu2",
//!   "manifold": "cp",
//!   "n": 2,
//!   "perturbation": { "f": "mu1*mu2", "eps": 0.2 },
//!   "grid": { "nodes_per_axis": 48 },
//!   "k_list": [0, 1, 2],
//!   "field": [1.0, 1.0]
//! }
//! ```
//!
//! `manifold` is `"cp"` (with `n`), `"blowup"` (the one-point blow-up of
//! ℂP², Guillemin metric) or `"polytope"` (with `facets`). `reference` may be
//! `"fubini-study"` (ℂPⁿ only) or `"guillemin"`.

use std::path::Path;

use ekverify_core::functionals::{probe_positivity, FunctionalError, Scenario};
use ekverify_core::geometry::{Facet, GeometryError, Perturbation, Polytope, Reference};
use ekverify_core::quad::{Domain, GridSpec, QuadError};
use serde::Deserialize;

use crate::formula::parse_formula;

pub const SCHEMA_VERSION: u32 = 1;

/// Nodes per simplex axis of the positivity probe run at load time.
const PROBE_NODES: usize = 8;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "default_version")]
    version: u32,
    #[serde(default)]
    id: Option<String>,
    manifold: ManifoldKind,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    facets: Option<Vec<FacetFile>>,
    #[serde(default)]
    reference: Option<ReferenceKind>,
    #[serde(default)]
    perturbation: Option<PerturbationFile>,
    #[serde(default)]
    grid: GridFile,
    #[serde(default)]
    k_list: Option<Vec<usize>>,
    #[serde(default)]
    field: Option<Vec<f64>>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ManifoldKind {
    Cp,
    Blowup,
    Polytope,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ReferenceKind {
    FubiniStudy,
    Guillemin,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FacetFile {
    normal: Vec<i64>,
    offset: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbationFile {
    f: String,
    eps: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    domain: Option<DomainKind>,
    #[serde(default)]
    half_width: Option<f64>,
    #[serde(default)]
    nodes_per_axis: Option<usize>,
    #[serde(default)]
    t_nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DomainKind {
    Moment,
    Box,
}

/// A validated scenario together with its label and optional toric field.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub id: String,
    pub scenario: Scenario,
    pub field: Option<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid scenario at `{path}`: {msg}")]
    Schema { path: String, msg: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl LoadError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numeric(_) => 3,
            _ => 2,
        }
    }
}

fn schema(path: &str, msg: impl Into<String>) -> LoadError {
    LoadError::Schema { path: path.into(), msg: msg.into() }
}

/// Whether a core error is a configuration problem (exit 2) rather than a
/// numerical failure (exit 3).
pub fn is_config_error(e: &FunctionalError) -> bool {
    match e {
        FunctionalError::Geometry(g) => matches!(
            g,
            GeometryError::InvalidPolytope(_)
                | GeometryError::NotDelzant { .. }
                | GeometryError::NotAnticanonical
                | GeometryError::DimensionMismatch { .. }
                | GeometryError::BadPerturbation(_)
                | GeometryError::WedgeExponents { .. }
        ),
        FunctionalError::Quad(q) => matches!(q, QuadError::InvalidGrid),
        FunctionalError::OrderOutOfRange { .. } | FunctionalError::ReferenceMismatch => true,
        FunctionalError::PathNotPositive { .. } => false,
    }
}

fn classify(e: FunctionalError) -> LoadError {
    if is_config_error(&e) {
        LoadError::Invalid(e.to_string())
    } else {
        LoadError::Numeric(e.to_string())
    }
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_scenario(&text, &stem)
}

/// Parses and validates a scenario document; `default_id` is used when the
/// document has no `id`.
pub fn parse_scenario(text: &str, default_id: &str) -> Result<LoadedScenario, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })?;
    build(file, default_id)
}

fn build(file: ScenarioFile, default_id: &str) -> Result<LoadedScenario, LoadError> {
    if file.version != SCHEMA_VERSION {
        return Err(schema("version", format!("unsupported schema version {}, expected {SCHEMA_VERSION}", file.version)));
    }
    let reference = match file.manifold {
        ManifoldKind::Cp => {
            let n = file.n.ok_or_else(|| schema("n", "missing field `n` for manifold \"cp\""))?;
            if n == 0 {
                return Err(schema("n", "dimension must be at least 1"));
            }
            if file.facets.is_some() {
                return Err(schema("facets", "facets are only allowed for manifold \"polytope\""));
            }
            match file.reference.unwrap_or(ReferenceKind::FubiniStudy) {
                ReferenceKind::FubiniStudy => Reference::FubiniStudy(n),
                ReferenceKind::Guillemin => Reference::Guillemin(Polytope::projective_space(n)),
            }
        }
        ManifoldKind::Blowup => {
            if file.n.is_some_and(|n| n != 2) {
                return Err(schema("n", "the blow-up is two-dimensional"));
            }
            if file.facets.is_some() {
                return Err(schema("facets", "facets are only allowed for manifold \"polytope\""));
            }
            guillemin_only(file.reference)?;
            Reference::Guillemin(Polytope::blowup_p2())
        }
        ManifoldKind::Polytope => {
            let facets = file.facets.as_ref().ok_or_else(|| schema("facets", "missing field `facets` for manifold \"polytope\""))?;
            guillemin_only(file.reference)?;
            let facets = facets.iter().map(|f| Facet::new(f.normal.clone(), f.offset)).collect();
            let p = Polytope::new(facets).map_err(|e| LoadError::Invalid(e.to_string()))?;
            if file.n.is_some_and(|n| n != p.dim()) {
                return Err(schema("n", format!("polytope has dimension {}", p.dim())));
            }
            Reference::Guillemin(p)
        }
    };
    let n = reference.dim();

    let perturbation = match &file.perturbation {
        None => None,
        Some(p) => {
            let f = parse_formula(&p.f).map_err(|e| schema("perturbation.f", e.to_string()))?;
            if let Some(v) = f.max_var().filter(|&v| v >= n) {
                return Err(schema("perturbation.f", format!("variable mu{} exceeds dimension {n}", v + 1)));
            }
            if !p.eps.is_finite() {
                return Err(schema("perturbation.eps", "must be finite"));
            }
            Some(Perturbation::Moment { f, eps: p.eps })
        }
    };

    let defaults = GridSpec::default_for(n);
    let grid = GridSpec {
        domain: match file.grid.domain {
            Some(DomainKind::Box) => Domain::Box,
            Some(DomainKind::Moment) => Domain::Moment,
            None => defaults.domain,
        },
        half_width: file.grid.half_width.unwrap_or(defaults.half_width),
        nodes_per_axis: file.grid.nodes_per_axis.unwrap_or(defaults.nodes_per_axis),
        t_nodes: file.grid.t_nodes.unwrap_or(defaults.t_nodes),
    };
    if grid.validate().is_err() {
        return Err(schema("grid", "need half_width > 0, even nodes_per_axis >= 8 and t_nodes >= 4"));
    }

    let k_list = file.k_list.clone().unwrap_or_else(|| (0..=n).collect());
    if let Some(k) = k_list.iter().find(|&&k| k > n) {
        return Err(schema("k_list", format!("order {k} exceeds dimension {n}")));
    }
    if let Some(v) = &file.field {
        if v.len() != n {
            return Err(schema("field", format!("expected {n} components, got {}", v.len())));
        }
    }

    let mut scenario = Scenario::new(reference, perturbation);
    scenario.grid = grid;
    scenario.k_list = k_list;
    scenario.validate().map_err(classify)?;
    probe_positivity(&scenario, PROBE_NODES).map_err(classify)?;

    Ok(LoadedScenario { id: file.id.unwrap_or_else(|| default_id.to_string()), scenario, field: file.field })
}

fn guillemin_only(r: Option<ReferenceKind>) -> Result<(), LoadError> {
    match r {
        Some(ReferenceKind::FubiniStudy) => Err(schema("reference", "fubini-study is only defined for manifold \"cp\"")),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_default_grid() {
        let s = parse_scenario(r#"{"manifold": "cp", "n": 2, "perturbation": {"f": "mu1*mu2", "eps": 0.2}}"#, "x").unwrap();
        assert_eq!(s.scenario.grid.half_width, 20.0);
        assert_eq!(s.scenario.grid.nodes_per_axis, 48);
        assert_eq!(s.scenario.grid.t_nodes, 16);
        assert_eq!(s.scenario.k_list, vec![0, 1, 2]);
        assert_eq!(s.id, "x");
    }

    #[test]
    fn unknown_field_names_its_path() {
        let e = parse_scenario(r#"{"manifold": "cp", "n": 1, "grid": {"nodes": 8}}"#, "x").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(matches!(&e, LoadError::Schema { path, .. } if path == "grid.nodes"), "{e}");
    }

    #[test]
    fn missing_manifold() {
        let e = parse_scenario(r#"{"n": 1}"#, "x").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("manifold"), "{e}");
    }

    #[test]
    fn order_above_dimension() {
        let e = parse_scenario(r#"{"manifold": "cp", "n": 2, "k_list": [0,1,2,3]}"#, "x").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(matches!(&e, LoadError::Schema { path, .. } if path == "k_list"));
    }

    #[test]
    fn non_delzant_polytope() {
        let doc = r#"{"manifold": "polytope", "facets": [
            {"normal": [1, 0], "offset": 1}, {"normal": [1, 2], "offset": 1},
            {"normal": [-1, -1], "offset": 1}]}"#;
        let e = parse_scenario(doc, "x").unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
    }

    #[test]
    fn polytope_blowup_matches_builtin() {
        let doc = r#"{"manifold": "polytope", "facets": [
            {"normal": [1, 0], "offset": 1}, {"normal": [0, 1], "offset": 1},
            {"normal": [-1, -1], "offset": 1}, {"normal": [1, 1], "offset": 1}]}"#;
        let s = parse_scenario(doc, "x").unwrap();
        assert_eq!(s.scenario.dim(), 2);
    }

    #[test]
    fn large_eps_breaks_positivity() {
        let e = parse_scenario(r#"{"manifold": "cp", "n": 2, "perturbation": {"f": "mu1*mu2", "eps": 1.0}}"#, "x").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("x = ["), "{e}");
    }

    #[test]
    fn bad_formula_and_version() {
        let e = parse_scenario(r#"{"manifold": "cp", "n": 1, "perturbation": {"f": "mu1*", "eps": 0.1}}"#, "x").unwrap_err();
        assert!(matches!(&e, LoadError::Schema { path, .. } if path == "perturbation.f"));
        let e = parse_scenario(r#"{"manifold": "cp", "n": 1, "perturbation": {"f": "mu2", "eps": 0.1}}"#, "x").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = parse_scenario(r#"{"version": 2, "manifold": "cp", "n": 1}"#, "x").unwrap_err();
        assert!(matches!(&e, LoadError::Schema { path, .. } if path == "version"));
    }
}
