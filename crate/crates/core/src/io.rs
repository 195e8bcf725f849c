//! File formats: semigroup tables, weight files, and JSON/DOT reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::lattice::{IdealId, SupportLattice};
use crate::linalg::{format_rational, parse_rational, ParseRationalError, Rational};
use crate::semigroup::{
    ElementId, LawReport, LawViolation, MultiplicationTable, SemigroupDiagnostic, SemigroupError,
};
use crate::spectra::{SpectrumReport, WeightedElement};
use crate::walks::{MeasureReport, WalkReport};

/// Version stamped into every report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field n = {n} but {labels} labels given")]
    CountMismatch { n: usize, labels: usize },
    #[error(transparent)]
    Table(#[from] SemigroupError),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("weight for {label:?}: {source}")]
    Rational { label: String, source: ParseRationalError },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: usize,
    labels: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
}

pub fn parse_table(text: &str) -> Result<MultiplicationTable, FormatError> {
    let file: TableFile = serde_json::from_str(text)?;
    if file.n != file.labels.len() {
        return Err(FormatError::CountMismatch { n: file.n, labels: file.labels.len() });
    }
    Ok(MultiplicationTable::new(file.labels, file.table, file.identity)?)
}

/// Canonical text of a table: fixed key order, one row per line.
pub fn write_table(table: &MultiplicationTable) -> String {
    let labels: Vec<String> = table.labels().iter().map(|l| Value::from(l.as_str()).to_string()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"n\": {},", table.len());
    let _ = writeln!(out, "  \"labels\": [{}],", labels.join(", "));
    let _ = writeln!(out, "  \"identity\": {},", table.identity().0);
    let _ = writeln!(out, "  \"table\": [");
    let rows = table.rows();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let comma = if i + 1 < rows.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{comma}", cells.join(", "));
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    weights: BTreeMap<String, String>,
}

/// Parses `{"weights": {label: "p/q", ...}}` against the table's labels.
pub fn parse_weights(text: &str, table: &MultiplicationTable) -> Result<WeightedElement, FormatError> {
    let file: WeightsFile = serde_json::from_str(text)?;
    let mut terms = Vec::with_capacity(file.weights.len());
    for (label, value) in file.weights {
        let s = table.find_label(&label).ok_or_else(|| FormatError::UnknownLabel(label.clone()))?;
        let c = parse_rational(&value).map_err(|source| FormatError::Rational { label: label.clone(), source })?;
        terms.push((s, c));
    }
    Ok(WeightedElement::from_terms(terms))
}

pub fn write_weights(w: &WeightedElement, table: &MultiplicationTable) -> String {
    let weights: Map<String, Value> =
        w.terms().map(|(s, c)| (table.label(s).to_string(), Value::from(format_rational(c)))).collect();
    to_pretty(&json!({ "weights": weights }))
}

pub fn to_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn rat(x: &Rational) -> Value {
    Value::from(format_rational(x))
}

fn rats(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rat).collect())
}

fn labels_of(table: &MultiplicationTable, elements: &[ElementId]) -> Value {
    Value::Array(elements.iter().map(|&s| Value::from(table.label(s))).collect())
}

fn kernel_map(dims: &[(Rational, usize)]) -> Value {
    Value::Object(dims.iter().map(|(l, d)| (format_rational(l), Value::from(*d))).collect())
}

fn pair(pair: Option<(IdealId, IdealId)>) -> Value {
    match pair {
        Some((x, y)) => json!({ "greater": x.0, "lesser": y.0 }),
        None => Value::Null,
    }
}

pub fn diagnostic_json(d: &SemigroupDiagnostic) -> Value {
    match d {
        SemigroupDiagnostic::Ok => json!({ "ok": true }),
        SemigroupDiagnostic::NotAssociative { a, b, c } => json!({
            "ok": false,
            "violation": "associativity",
            "elements": [a.0, b.0, c.0],
            "message": d.to_string(),
        }),
        SemigroupDiagnostic::IdentityLaw { element, side } => json!({
            "ok": false,
            "violation": "identity",
            "element": element.0,
            "side": side,
            "message": d.to_string(),
        }),
    }
}

fn violation_json(table: &MultiplicationTable, v: &LawViolation) -> Value {
    json!({
        "law": v.law,
        "x": v.x.0,
        "y": v.y.0,
        "x_label": table.label(v.x),
        "y_label": table.label(v.y),
    })
}

pub fn validation_json(table: &MultiplicationTable, diagnostic: &SemigroupDiagnostic, laws: &LawReport) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "validate",
        "n": table.len(),
        "semigroup": diagnostic_json(diagnostic),
        "laws": {
            "is_band": laws.is_band,
            "is_left_regular": laws.is_left_regular,
            "counterexamples": laws.counterexamples.iter().map(|v| violation_json(table, v)).collect::<Vec<_>>(),
        },
    })
}

fn ideals_json(table: &MultiplicationTable, lattice: &SupportLattice, lambdas: Option<&[Rational]>) -> Value {
    Value::Array(
        lattice
            .ideals()
            .map(|x| {
                let mut obj = Map::new();
                obj.insert("id".into(), Value::from(x.0));
                obj.insert("members".into(), labels_of(table, lattice.members(x)));
                if let Some(ls) = lambdas {
                    obj.insert("lambda".into(), rat(&ls[x.0]));
                }
                Value::Object(obj)
            })
            .collect(),
    )
}

pub fn lattice_json(table: &MultiplicationTable, lattice: &SupportLattice) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "lattice",
        "m": lattice.len(),
        "ideals": ideals_json(table, lattice, None),
        "covers": lattice.covers().iter().map(|(u, l)| json!([u.0, l.0])).collect::<Vec<_>>(),
        "top": lattice.top().0,
        "bottom": lattice.bottom().0,
        "sigma": lattice.sigma_table().iter().map(|x| x.0).collect::<Vec<_>>(),
        "descending_order": lattice.descending_order().iter().map(|x| x.0).collect::<Vec<_>>(),
    })
}

pub fn spectrum_json(table: &MultiplicationTable, lattice: &SupportLattice, report: &SpectrumReport) -> Value {
    let lt = &report.lambda_table;
    let hypothesis = match lt.violation() {
        Some((x, y)) => json!({
            "ok": false,
            "violation": { "greater": x.0, "lesser": y.0, "value": rat(lt.lambda(x)) },
        }),
        None => json!({ "ok": true, "violation": null }),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "spectrum",
        "n": table.len(),
        "side": report.side,
        "ideals": ideals_json(table, lattice, Some(lt.values())),
        "distinct_lambdas": rats(lt.distinct()),
        "hypothesis": hypothesis,
        "minimal_polynomial": {
            "coefficients": rats(report.minimal_poly.coeffs()),
            "text": report.minimal_poly.to_string(),
            "squarefree": report.squarefree,
        },
        "checks": {
            "decomposition": report.decomposition_ok,
            "local_annihilation": report.local_annihilation_ok,
            "annihilation": report.annihilation_ok,
            "minimal_polynomial_divides_product": report.minimal_poly_divides_product,
        },
        "diagonalizable": report.diagonalizable,
        "kernel_dims": kernel_map(&report.kernel_dims),
        "notes": report.notes,
    })
}

pub fn walk_json(table: &MultiplicationTable, measure: &MeasureReport, walk: &WalkReport) -> Value {
    let restricted = match &measure.restricted {
        None => Value::Null,
        Some(r) => json!({
            "elements": labels_of(&r.submonoid.table, &r.submonoid.table.elements().collect::<Vec<_>>()),
            "ideals": r.lattice.len(),
            "lambdas": rats(r.lambda_table.values()),
            "hypothesis_ok": r.lambda_table.hypothesis_ok(),
            "monotonicity": { "ok": r.monotonicity.ok(), "witness": pair(r.monotonicity.witness) },
        }),
    };
    let mut notes = Vec::new();
    if !measure.generates_all {
        notes.push("support does not generate the monoid; monotonicity rechecked inside the generated submonoid");
    }
    if walk.annihilation_ok.is_none() {
        notes.push("no distinct-valued lambda table available; annihilation not checked");
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "walk",
        "states": walk.states,
        "state_labels": labels_of(table, &walk.state_elements),
        "matrix": walk.matrix.row_vecs().iter().map(|r| rats(r)).collect::<Vec<_>>(),
        "rows_stochastic": walk.rows_stochastic,
        "generates_all": measure.generates_all,
        "lambdas": rats(measure.lambda_table.values()),
        "hypothesis_ok": measure.lambda_table.hypothesis_ok(),
        "monotonicity": { "ok": measure.monotonicity.ok(), "witness": pair(measure.monotonicity.witness) },
        "restricted": restricted,
        "annihilation": {
            "source": walk.lambda_source,
            "values": rats(&walk.annihilating_values),
            "ok": walk.annihilation_ok,
        },
        "kernel_dims": kernel_map(&walk.kernel_dims),
        "notes": notes,
    })
}
