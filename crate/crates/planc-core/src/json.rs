//! JSON documents for series, fields, effective actions, and trees.
//!
//! Schemas:
//!   - series: {"alphabet": n, "max_degree": D, "scalar": "rational"|"float64",
//!     "coeffs": [{"word": [i1,...], "value": "p/q" | number}, ...]} with an
//!     optional "role" tag; coefficients are emitted sorted by
//!     (degree, lexicographic) and rationals are canonical "p/q" strings;
//!   - field: {"components": [series, ...]};
//!   - effective action: the series schema with "role": "effective_action"
//!     plus a "covariance" matrix block holding the degree-2 coefficients of
//!     the input cumulant series;
//!   - tree: {"marks": n, "root_label": 1, "leaf_labels": [2..n],
//!     "structure": nested arrays with leaves as their labels}.
//!
//! Reading is strict about the declared fields (wrong types, out-of-range
//! letters or degrees, or a value of the wrong scalar kind are schema
//! errors) but ignores unknown keys, so richer documents round-trip as plain
//! series. Writers emit fully deterministic output: object keys are sorted
//! and coefficient order is canonical.

use num::rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::action::EffectiveAction;
use crate::error::CoreError;
use crate::field::Field;
use crate::matrix::SquareMatrix;
use crate::scalar::{Scalar, ScalarKind};
use crate::series::Series;
use crate::trees::{AdmissibleTree, TreeNode};
use crate::word::Word;

/// Document-level failures; distinct from domain precondition failures.
#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed json: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

/// A series of either scalar kind, as read from a document.
#[derive(Clone, Debug)]
pub enum AnySeries {
    Rational(Series<BigRational>),
    Float64(Series<f64>),
}

impl AnySeries {
    pub fn alphabet(&self) -> u8 {
        match self {
            AnySeries::Rational(s) => s.alphabet(),
            AnySeries::Float64(s) => s.alphabet(),
        }
    }

    pub fn max_degree(&self) -> usize {
        match self {
            AnySeries::Rational(s) => s.max_degree(),
            AnySeries::Float64(s) => s.max_degree(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            AnySeries::Rational(_) => ScalarKind::Rational,
            AnySeries::Float64(_) => ScalarKind::Float64,
        }
    }
}

/// A field of either scalar kind.
#[derive(Clone, Debug)]
pub enum AnyField {
    Rational(Field<BigRational>),
    Float64(Field<f64>),
}

pub fn parse_document(text: &str) -> Result<Value, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Parse(e.to_string()))
}

pub fn series_to_json<S: Scalar>(s: &Series<S>, role: Option<&str>) -> Value {
    let coeffs: Vec<Value> = s
        .support()
        .map(|(w, c)| {
            json!({
                "word": w.letters(),
                "value": c.to_json(),
            })
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("alphabet".into(), json!(s.alphabet()));
    doc.insert("max_degree".into(), json!(s.max_degree()));
    doc.insert("scalar".into(), json!(S::kind().as_str()));
    if let Some(role) = role {
        doc.insert("role".into(), json!(role));
    }
    doc.insert("coeffs".into(), Value::Array(coeffs));
    Value::Object(doc)
}

fn want_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or_else(|| JsonError::Schema(format!("{what} must be an object")))
}

fn want_u64(doc: &Map<String, Value>, key: &str) -> Result<u64, JsonError> {
    doc.get(key)
        .ok_or_else(|| JsonError::Schema(format!("missing field \"{key}\"")))?
        .as_u64()
        .ok_or_else(|| JsonError::Schema(format!("\"{key}\" must be a non-negative integer")))
}

fn want_word(v: &Value) -> Result<Word, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JsonError::Schema("\"word\" must be an array of letters".into()))?;
    let mut letters = Vec::with_capacity(arr.len());
    for item in arr {
        let l = item
            .as_u64()
            .filter(|&l| (1..=255).contains(&l))
            .ok_or_else(|| JsonError::Schema("letters must be integers in 1..=255".into()))?;
        letters.push(l as u8);
    }
    Ok(Word::from_letters(letters))
}

fn collect_entries<S: Scalar>(
    alphabet: u8,
    max_degree: usize,
    coeffs: &[Value],
) -> Result<Series<S>, JsonError> {
    let mut entries = Vec::with_capacity(coeffs.len());
    for entry in coeffs {
        let obj = want_object(entry, "coefficient entry")?;
        let word = want_word(
            obj.get("word")
                .ok_or_else(|| JsonError::Schema("coefficient entry missing \"word\"".into()))?,
        )?;
        let value = obj
            .get("value")
            .ok_or_else(|| JsonError::Schema("coefficient entry missing \"value\"".into()))?;
        let value = S::from_json(value).map_err(JsonError::Schema)?;
        entries.push((word, value));
    }
    Series::from_entries(alphabet, max_degree, entries)
        .map_err(|e: CoreError| JsonError::Schema(e.to_string()))
}

pub fn series_from_json(v: &Value) -> Result<AnySeries, JsonError> {
    let doc = want_object(v, "series document")?;
    let alphabet = want_u64(doc, "alphabet")?;
    if !(1..=255).contains(&alphabet) {
        return Err(JsonError::Schema("\"alphabet\" must be in 1..=255".into()));
    }
    let alphabet = alphabet as u8;
    let max_degree = want_u64(doc, "max_degree")? as usize;
    let scalar = doc
        .get("scalar")
        .and_then(Value::as_str)
        .ok_or_else(|| JsonError::Schema("missing or non-string \"scalar\"".into()))?;
    let coeffs = doc
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| JsonError::Schema("missing or non-array \"coeffs\"".into()))?;
    match scalar {
        "rational" => Ok(AnySeries::Rational(collect_entries(
            alphabet, max_degree, coeffs,
        )?)),
        "float64" => Ok(AnySeries::Float64(collect_entries(
            alphabet, max_degree, coeffs,
        )?)),
        other => Err(JsonError::Schema(format!(
            "unknown scalar kind \"{other}\" (expected \"rational\" or \"float64\")"
        ))),
    }
}

/// The "role" tag of a document, if any.
pub fn document_role(v: &Value) -> Option<&str> {
    v.as_object()?.get("role")?.as_str()
}

pub fn field_to_json<S: Scalar>(f: &Field<S>) -> Value {
    let components: Vec<Value> = f
        .components()
        .iter()
        .map(|s| series_to_json(s, None))
        .collect();
    let mut doc = Map::new();
    doc.insert("components".into(), Value::Array(components));
    Value::Object(doc)
}

pub fn field_from_json(v: &Value) -> Result<AnyField, JsonError> {
    let doc = want_object(v, "field document")?;
    let components = doc
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| JsonError::Schema("missing or non-array \"components\"".into()))?;
    if components.is_empty() {
        return Err(JsonError::Schema(
            "a field needs at least one component".into(),
        ));
    }
    let parsed: Vec<AnySeries> = components
        .iter()
        .map(series_from_json)
        .collect::<Result<_, _>>()?;
    let kind = parsed[0].kind();
    let alphabet = parsed[0].alphabet();
    for s in &parsed {
        if s.kind() != kind {
            return Err(JsonError::Schema("mixed scalar kinds in one field".into()));
        }
        if s.alphabet() != alphabet {
            return Err(JsonError::Schema("mixed alphabets in one field".into()));
        }
    }
    if parsed.len() != alphabet as usize {
        return Err(JsonError::Schema(format!(
            "a field over {alphabet} letters needs {alphabet} components, got {}",
            parsed.len()
        )));
    }
    match kind {
        ScalarKind::Rational => Ok(AnyField::Rational(Field::new(
            parsed
                .into_iter()
                .map(|s| match s {
                    AnySeries::Rational(s) => s,
                    AnySeries::Float64(_) => unreachable!(),
                })
                .collect(),
        ))),
        ScalarKind::Float64 => Ok(AnyField::Float64(Field::new(
            parsed
                .into_iter()
                .map(|s| match s {
                    AnySeries::Float64(s) => s,
                    AnySeries::Rational(_) => unreachable!(),
                })
                .collect(),
        ))),
    }
}

fn matrix_to_json<S: Scalar>(m: &SquareMatrix<S>) -> Value {
    let rows: Vec<Value> = (0..m.n())
        .map(|i| Value::Array((0..m.n()).map(|j| m.get(i, j).to_json()).collect()))
        .collect();
    Value::Array(rows)
}

/// The effective action document: L as a series tagged "effective_action",
/// with the input covariance matrix attached.
pub fn action_to_json<S: Scalar>(action: &EffectiveAction<S>) -> Value {
    let mut doc = match series_to_json(&action.ell, Some("effective_action")) {
        Value::Object(map) => map,
        _ => unreachable!(),
    };
    doc.insert("covariance".into(), matrix_to_json(&action.covariance));
    Value::Object(doc)
}

fn structure_to_json(node: &TreeNode, next_label: &mut usize) -> Value {
    match node {
        TreeNode::Leaf => {
            let label = *next_label;
            *next_label += 1;
            json!(label)
        }
        TreeNode::Node(children) => Value::Array(
            children
                .iter()
                .map(|c| structure_to_json(c, &mut *next_label))
                .collect(),
        ),
    }
}

pub fn tree_to_json(tree: &AdmissibleTree) -> Value {
    let mut next_label = 2usize;
    let structure = structure_to_json(&tree.root, &mut next_label);
    let mut doc = Map::new();
    doc.insert("marks".into(), json!(tree.marks));
    doc.insert("root_label".into(), json!(1));
    doc.insert(
        "leaf_labels".into(),
        Value::Array((2..=tree.marks).map(|m| json!(m)).collect()),
    );
    doc.insert("structure".into(), structure);
    Value::Object(doc)
}

fn structure_from_json(v: &Value) -> Result<TreeNode, JsonError> {
    match v {
        Value::Number(_) => Ok(TreeNode::Leaf),
        Value::Array(children) => {
            if children.len() < 2 {
                return Err(JsonError::Schema(
                    "internal tree nodes need at least 2 children".into(),
                ));
            }
            Ok(TreeNode::Node(
                children
                    .iter()
                    .map(structure_from_json)
                    .collect::<Result<_, _>>()?,
            ))
        }
        _ => Err(JsonError::Schema(
            "tree structure entries must be labels or arrays".into(),
        )),
    }
}

pub fn tree_from_json(v: &Value) -> Result<AdmissibleTree, JsonError> {
    let doc = want_object(v, "tree document")?;
    let marks = want_u64(doc, "marks")? as usize;
    let structure = doc
        .get("structure")
        .ok_or_else(|| JsonError::Schema("missing \"structure\"".into()))?;
    let root = structure_from_json(structure)?;
    if root.leaf_count() != marks.saturating_sub(1) {
        return Err(JsonError::Schema(format!(
            "structure has {} leaves but marks = {marks}",
            root.leaf_count()
        )));
    }
    Ok(AdmissibleTree { marks, root })
}

/// Renders a JSON value with deterministic formatting (sorted keys come from
/// the map representation; numbers use the shortest round-trip form).
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json rendering cannot fail")
}
