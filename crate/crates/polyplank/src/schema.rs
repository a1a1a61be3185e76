//! JSON schemas for polynomials, instances, vector families, cylinders, and
//! the machine-readable reports. Complex vectors are encoded as flat
//! [re, im, re, im, ...] arrays; real sphere points as plain arrays.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bernstein::LemmaReport;
use crate::corollaries::{
    ManyVectorsReport, PolarizationReport, SpanAvoidReport, SteinhausReport, VectorConfig,
};
use crate::covering::{Cylinder, CoveringOutcome};
use crate::distance::DistanceEstimate;
use crate::error::{Error, Result};
use crate::homogenization::ConvergenceReport;
use crate::maximizer::{Status, WitnessReport};
use crate::num::C64;
use crate::objective::{Domain, PlankInstance, PlankItem};
use crate::poly::{Field, MultiPoly};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(schema: Option<u32>) -> Result<()> {
    match schema {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Schema(format!(
            "unsupported schema version {v} (expected {SCHEMA_VERSION})"
        ))),
    }
}

/// Flat [re, im, ...] pairs -> complex vector.
pub fn c64s_from_flat(v: &[f64]) -> Result<Vec<C64>> {
    if v.len() % 2 != 0 {
        return Err(Error::Schema(
            "complex vector needs an even number of entries (re, im pairs)".into(),
        ));
    }
    Ok(v.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

pub fn flat_from_c64s(v: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for z in v {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomials.

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub im: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PolyJson {
    pub dimension: usize,
    pub field: Field,
    pub terms: Vec<TermJson>,
}

pub fn poly_from_json(j: &PolyJson) -> Result<MultiPoly> {
    for t in &j.terms {
        if t.exp.len() != j.dimension {
            return Err(Error::Schema(format!(
                "term exponent length {} does not match dimension {}",
                t.exp.len(),
                j.dimension
            )));
        }
    }
    MultiPoly::new(
        j.dimension,
        j.field,
        j.terms.iter().map(|t| (t.exp.clone(), C64::new(t.re, t.im))),
    )
}

pub fn poly_to_json(p: &MultiPoly) -> PolyJson {
    PolyJson {
        dimension: p.dim(),
        field: p.field(),
        terms: p
            .terms()
            .map(|(e, c)| TermJson {
                exp: e.clone(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Plank instances.

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainJson {
    ComplexBall {
        #[serde(rename = "R")]
        r: f64,
    },
    RealSphere,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ItemJson {
    pub poly: PolyJson,
    pub delta: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct InstanceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub domain: DomainJson,
    pub items: Vec<ItemJson>,
    #[serde(default)]
    pub exploratory: bool,
}

pub fn instance_from_json(j: &InstanceJson) -> Result<PlankInstance> {
    check_version(j.schema)?;
    let domain = match j.domain {
        DomainJson::ComplexBall { r } => Domain::ComplexBall { radius: r },
        DomainJson::RealSphere => Domain::RealSphere,
    };
    let mut items = Vec::with_capacity(j.items.len());
    for (i, item) in j.items.iter().enumerate() {
        let poly = poly_from_json(&item.poly)
            .map_err(|e| Error::Schema(format!("items[{i}].poly: {e}")))?;
        if poly.is_zero() {
            return Err(Error::Schema(format!("items[{i}]: zero polynomial")));
        }
        items.push(PlankItem {
            poly,
            delta: item.delta,
        });
    }
    PlankInstance::new(domain, items, j.exploratory)
}

pub fn parse_instance(text: &str) -> Result<PlankInstance> {
    let j: InstanceJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    instance_from_json(&j)
}

// ---------------------------------------------------------------------------
// Vector families.

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct VectorsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub d: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<Vec<f64>>>,
}

pub fn vectors_from_json(j: &VectorsJson) -> Result<VectorConfig> {
    check_version(j.schema)?;
    let vectors = j
        .vectors
        .iter()
        .map(|v| c64s_from_flat(v))
        .collect::<Result<Vec<_>>>()?;
    let shifts = match &j.shifts {
        Some(sh) => Some(
            sh.iter()
                .map(|v| c64s_from_flat(v))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    VectorConfig::new(j.d, vectors, shifts)
}

pub fn parse_vectors(text: &str) -> Result<VectorConfig> {
    let j: VectorsJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    vectors_from_json(&j)
}

// ---------------------------------------------------------------------------
// Cylinders.

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CylinderJson {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub delta: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CylindersJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub cylinders: Vec<CylinderJson>,
}

pub fn cylinders_from_json(j: &CylindersJson) -> Result<Vec<Cylinder>> {
    check_version(j.schema)?;
    j.cylinders
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Cylinder::new(c64s_from_flat(&c.u)?, c64s_from_flat(&c.y)?, c.delta)
                .map_err(|e| Error::Schema(format!("cylinders[{i}]: {e}")))
        })
        .collect()
}

pub fn parse_cylinders(text: &str) -> Result<Vec<Cylinder>> {
    let j: CylindersJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    cylinders_from_json(&j)
}

// ---------------------------------------------------------------------------
// Reports.

fn witness_value(point: &[C64], domain: &Domain) -> Value {
    match domain {
        Domain::ComplexBall { .. } => json!(flat_from_c64s(point)),
        Domain::RealSphere => json!(point.iter().map(|z| z.re).collect::<Vec<f64>>()),
    }
}

pub fn status_str(status: Status) -> &'static str {
    match status {
        Status::CertifiedMargins => "certified_margins",
        Status::OptimizationSuspect => "optimization_suspect",
    }
}

pub fn witness_report_json(report: &WitnessReport, domain: &Domain) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": report.seed,
        "status": status_str(report.status),
        "witness": witness_value(&report.witness, domain),
        "value": report.value,
        "items": report.items.iter().map(|it| json!({
            "delta": it.delta,
            "distance": it.distance,
            "margin": it.margin,
        })).collect::<Vec<_>>(),
    })
}

pub fn covering_report_json(outcome: &CoveringOutcome, seed: u64) -> Value {
    match outcome {
        CoveringOutcome::BudgetNotViolated { total, limit } => json!({
            "schema": SCHEMA_VERSION,
            "seed": seed,
            "outcome": "budget_not_violated",
            "total_squared_widths": total,
            "limit": limit,
        }),
        CoveringOutcome::Witness { point, margins } => json!({
            "schema": SCHEMA_VERSION,
            "seed": seed,
            "outcome": "witness",
            "witness": flat_from_c64s(point),
            "margins": margins,
        }),
    }
}

pub fn bernstein_bounds_json(n: u32, k: u32, bound_a: f64, bound_b: f64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "n": n,
        "k": k,
        "bound_a": bound_a,
        "bound_b": bound_b,
    })
}

pub fn lemma_report_json(r: &LemmaReport) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "n": r.n,
        "k": r.k,
        "t0": r.t0,
        "max_value": r.max_value,
        "bound_a": r.bound_a,
        "bound_b": r.bound_b,
        "slack_a": r.slack_a,
        "slack_b": r.slack_b,
        "passes": r.passes,
    })
}

pub fn span_avoid_json(r: &SpanAvoidReport, k: usize, seed: u64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "k": k,
        "q": flat_from_c64s(&r.q),
        "min_distance": r.min_distance,
        "bound": r.bound,
    })
}

pub fn many_vectors_json(r: &ManyVectorsReport, seed: u64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "q": flat_from_c64s(&r.q),
        "min_distance": r.min_distance,
        "bound": r.bound,
        "perturbed": r.perturbed,
    })
}

pub fn polarization_json(r: &PolarizationReport, seed: u64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "x": flat_from_c64s(&r.x),
        "value": r.value,
        "bound": r.bound,
    })
}

pub fn steinhaus_json(r: &SteinhausReport, seed: u64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "q": flat_from_c64s(&r.q),
        "u_norm": r.u_norm,
        "phases": flat_from_c64s(&r.phases),
    })
}

pub fn convergence_json(r: &ConvergenceReport) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "rows": r.rows.iter().map(|row| json!({
            "delta0": row.delta0,
            "sup_error": row.sup_error,
        })).collect::<Vec<_>>(),
        "decreasing": r.decreasing,
        "last_within_tolerance": r.last_within_tolerance,
    })
}

pub fn distance_json(est: &DistanceEstimate, estimator: &str, seed: u64) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "seed": seed,
        "estimator": estimator,
        "distance": est.distance,
        "zero": est.zero.as_ref().map(|z| flat_from_c64s(z)),
        "residual": est.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip_bit_exact() {
        let text = r#"{
            "dimension": 2,
            "field": "complex",
            "terms": [
                {"exp": [1, 1], "re": 0.1, "im": -2.5e-17},
                {"exp": [0, 0], "re": 1.0}
            ]
        }"#;
        let j: PolyJson = serde_json::from_str(text).unwrap();
        let p = poly_from_json(&j).unwrap();
        let back = poly_to_json(&p);
        let p2 = poly_from_json(&back).unwrap();
        assert_eq!(
            p.evaluate(&[C64::new(1.0, 2.0), C64::new(-0.5, 0.25)]).unwrap(),
            p2.evaluate(&[C64::new(1.0, 2.0), C64::new(-0.5, 0.25)]).unwrap()
        );
        // Doubles survive serialization exactly (shortest round-trip).
        let s = serde_json::to_string(&back).unwrap();
        let j3: PolyJson = serde_json::from_str(&s).unwrap();
        let t = j3.terms.iter().find(|t| t.exp == [1, 1]).unwrap();
        assert_eq!(t.re, 0.1);
        assert_eq!(t.im, -2.5e-17);
    }

    #[test]
    fn instance_parses() {
        let text = r#"{
            "schema": 1,
            "domain": {"type": "complex_ball", "R": 1.0},
            "items": [
                {"poly": {"dimension": 1, "field": "complex",
                          "terms": [{"exp": [1], "re": 1.0}]},
                 "delta": 1.0}
            ]
        }"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.dim(), 1);
    }

    #[test]
    fn instance_rejects_zero_poly_with_index() {
        let text = r#"{
            "domain": {"type": "complex_ball", "R": 1.0},
            "items": [
                {"poly": {"dimension": 1, "field": "complex",
                          "terms": [{"exp": [1], "re": 1.0}]},
                 "delta": 0.5},
                {"poly": {"dimension": 1, "field": "complex", "terms": []},
                 "delta": 0.5}
            ]
        }"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("items[1]"), "{err}");
    }

    #[test]
    fn instance_budget_violation_reported() {
        let text = r#"{
            "domain": {"type": "complex_ball", "R": 1.0},
            "items": [
                {"poly": {"dimension": 1, "field": "complex",
                          "terms": [{"exp": [2], "re": 1.0}]},
                 "delta": 1.0}
            ]
        }"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, Error::BudgetViolation { .. }), "{err}");
    }

    #[test]
    fn exploratory_bypasses_budget() {
        let text = r#"{
            "domain": {"type": "complex_ball", "R": 1.0},
            "items": [
                {"poly": {"dimension": 1, "field": "complex",
                          "terms": [{"exp": [2], "re": 1.0}]},
                 "delta": 1.0}
            ],
            "exploratory": true
        }"#;
        assert!(parse_instance(text).is_ok());
    }

    #[test]
    fn vectors_parse() {
        let text = r#"{"d": 2, "vectors": [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]}"#;
        let cfg = parse_vectors(text).unwrap();
        assert_eq!(cfg.d(), 2);
        assert_eq!(cfg.vectors().len(), 2);
    }

    #[test]
    fn cylinders_parse_and_validate() {
        let text = r#"{"cylinders": [{"u": [1.0, 0.0], "y": [0.3, 0.0], "delta": 0.6}]}"#;
        let cyls = parse_cylinders(text).unwrap();
        assert_eq!(cyls.len(), 1);
        let bad = r#"{"cylinders": [{"u": [0.5, 0.0], "y": [0.0, 0.0], "delta": 0.6}]}"#;
        assert!(parse_cylinders(bad).is_err());
    }

    #[test]
    fn version_guard() {
        let text = r#"{"schema": 2, "d": 1, "vectors": [[1.0, 0.0]]}"#;
        assert!(parse_vectors(text).is_err());
    }
}
