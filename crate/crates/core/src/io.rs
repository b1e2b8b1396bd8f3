//! JSON documents: operators, vectors, weight alphabets and sum manifests.
//!
//! Complex numbers are `[re, im]` pairs. Weights are always written densely,
//! zeros included, and reals use the shortest representation that round-trips
//! (integral values without a fractional part).

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::adjoint::DecompositionResult;
use crate::error::{Error, Result};
use crate::model::{IndexMap, L2Vector, Scalar, SumOperator, WeightVector, WgsOperator};
use crate::semigroup::{NullSequenceRule, WeightAlphabet};

pub const SCHEMA_VERSION: &str = "1";

/// Largest magnitude below which integral floats are written as integers.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.fract() == 0.0 && v.abs() < EXACT_INT_LIMIT && !(v == 0.0 && v.is_sign_negative()) {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_f64(v)
        }
    }
}

fn pair(z: Scalar) -> [Real; 2] {
    [Real(z.re), Real(z.im)]
}

/// Maps a serde_json error to a byte offset into `text`.
fn parse_error(text: &str, err: serde_json::Error) -> Error {
    let (line, column) = (err.line(), err.column());
    let offset = if line == 0 {
        0
    } else {
        text.split_inclusive('\n')
            .take(line - 1)
            .map(str::len)
            .sum::<usize>()
            + column.saturating_sub(1)
    };
    Error::Parse {
        offset,
        message: err.to_string(),
    }
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_error(text, e))
}

fn from_value<T: for<'de> Deserialize<'de>>(what: &str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Validation(format!("{what}: {e}")))
}

fn scalar_from(what: &str, index: usize, parts: &[f64]) -> Result<Scalar> {
    match parts {
        [re, im] => Ok(Scalar::new(*re, *im)),
        _ => Err(Error::Validation(format!(
            "{what}[{index}] has {} components, expected [re, im]",
            parts.len()
        ))),
    }
}

fn scalars_from(what: &str, raw: &[Vec<f64>]) -> Result<Vec<Scalar>> {
    raw.iter()
        .enumerate()
        .map(|(i, p)| scalar_from(what, i, p))
        .collect()
}

#[derive(Debug, Serialize)]
pub struct OperatorDocument {
    pub schema_version: String,
    pub n: usize,
    pub phi: Vec<usize>,
    pub weights: Vec<[Real; 2]>,
}

impl From<&WgsOperator> for OperatorDocument {
    fn from(op: &WgsOperator) -> Self {
        OperatorDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            n: op.n(),
            phi: op.phi().image().to_vec(),
            weights: op.weights().entries().iter().map(|&z| pair(z)).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawOperator {
    schema_version: Option<String>,
    n: usize,
    phi: Vec<i64>,
    weights: Vec<Vec<f64>>,
}

fn check_schema(version: Option<&str>) -> Result<()> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Validation(format!(
            "unsupported schema_version {v:?} (expected {SCHEMA_VERSION:?})"
        ))),
    }
}

fn operator_from_value(v: Value) -> Result<WgsOperator> {
    let raw: RawOperator = from_value("operator document", v)?;
    check_schema(raw.schema_version.as_deref())?;
    let n = raw.n;
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    if raw.phi.len() != n {
        return Err(Error::Validation(format!(
            "phi has {} entries, expected n={n}",
            raw.phi.len()
        )));
    }
    if raw.weights.len() != n {
        return Err(Error::Validation(format!(
            "weights has {} entries, expected n={n}",
            raw.weights.len()
        )));
    }
    let mut image = Vec::with_capacity(n);
    for (alpha, &beta) in raw.phi.iter().enumerate() {
        if beta < 0 || beta as usize >= n {
            return Err(Error::Validation(format!(
                "phi[{alpha}]={beta} out of range [0,{n})"
            )));
        }
        image.push(beta as usize);
    }
    let weights = scalars_from("weights", &raw.weights)?;
    WgsOperator::new(IndexMap::new(image)?, WeightVector::new(weights)?)
}

pub fn load_operator(document: &str) -> Result<WgsOperator> {
    operator_from_value(parse_value(document)?)
}

/// Canonical compact form: keys `schema_version, n, phi, weights`.
pub fn save_operator(op: &WgsOperator) -> String {
    serde_json::to_string(&OperatorDocument::from(op)).expect("operator documents serialize")
}

pub fn load_vector(document: &str) -> Result<L2Vector> {
    let raw: Vec<Vec<f64>> = from_value("vector document", parse_value(document)?)?;
    L2Vector::new(scalars_from("vector", &raw)?)
}

pub fn save_vector(x: &L2Vector) -> String {
    let pairs: Vec<[Real; 2]> = x.coords().iter().map(|&z| pair(z)).collect();
    serde_json::to_string(&pairs).expect("vectors serialize")
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawAlphabet {
    Finite {
        elements: Vec<Vec<f64>>,
    },
    Annulus {
        delta: f64,
    },
    NullSequence {
        rule: String,
        ratio: Option<f64>,
        scale: Option<f64>,
    },
}

/// `{"kind":"finite","elements":[[re,im],...]}`, `{"kind":"annulus","delta":d}`
/// or `{"kind":"null_sequence","rule":"reciprocal"}` (also `"geometric"` with
/// `"ratio"` and optional `"scale"`).
pub fn load_alphabet(document: &str) -> Result<WeightAlphabet> {
    match from_value::<RawAlphabet>("alphabet document", parse_value(document)?)? {
        RawAlphabet::Finite { elements } => {
            WeightAlphabet::finite(scalars_from("elements", &elements)?)
        }
        RawAlphabet::Annulus { delta } => WeightAlphabet::annulus(delta),
        RawAlphabet::NullSequence { rule, ratio, scale } => {
            let rule = match (rule.as_str(), ratio, scale) {
                ("reciprocal", None, None) => NullSequenceRule::Reciprocal,
                ("geometric", Some(r), None) => NullSequenceRule::geometric(r)?,
                ("geometric", Some(r), Some(c)) => NullSequenceRule::geometric_with_scale(c, r)?,
                _ => {
                    return Err(Error::Validation(format!(
                        "unknown null_sequence rule {rule:?} or bad parameters"
                    )))
                }
            };
            Ok(WeightAlphabet::NullSequence(rule))
        }
    }
}

pub fn save_alphabet(a: &WeightAlphabet) -> String {
    let v = match a {
        WeightAlphabet::Finite(elements) => serde_json::json!({
            "kind": "finite",
            "elements": elements.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
        }),
        WeightAlphabet::Annulus { delta } => serde_json::json!({"kind": "annulus", "delta": delta}),
        WeightAlphabet::NullSequence(NullSequenceRule::Reciprocal) => {
            serde_json::json!({"kind": "null_sequence", "rule": "reciprocal"})
        }
        WeightAlphabet::NullSequence(NullSequenceRule::Geometric { scale, ratio }) => {
            serde_json::json!({"kind": "null_sequence", "rule": "geometric", "ratio": ratio, "scale": scale})
        }
    };
    v.to_string()
}

/// Loads the `terms` of a manifest. Each entry is either an inline operator
/// document or a path (relative to `base_dir`) to one. An empty list is
/// allowed; it denotes the zero operator.
pub fn load_terms(document: &str, base_dir: Option<&Path>) -> Result<Vec<WgsOperator>> {
    let v = parse_value(document)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Validation("manifest must be a JSON object".into()))?;
    check_schema(obj.get("schema_version").and_then(Value::as_str))?;
    let terms = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Validation("manifest has no \"terms\" array".into()))?;
    let ops = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let op = match t {
                Value::String(path) => {
                    let full = match base_dir {
                        Some(dir) => dir.join(path),
                        None => path.into(),
                    };
                    let text = std::fs::read_to_string(&full).map_err(|e| {
                        Error::Validation(format!(
                            "terms[{i}]: cannot read {}: {e}",
                            full.display()
                        ))
                    })?;
                    load_operator(&text)
                }
                other => operator_from_value(other.clone()),
            };
            op.map_err(|e| Error::Validation(format!("terms[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = ops.first() {
        if let Some((i, t)) = ops.iter().enumerate().find(|(_, t)| t.n() != first.n()) {
            return Err(Error::Validation(format!(
                "terms[{i}] has n={}, expected n={}",
                t.n(),
                first.n()
            )));
        }
    }
    Ok(ops)
}

pub fn load_sum(document: &str, base_dir: Option<&Path>) -> Result<SumOperator> {
    SumOperator::new(load_terms(document, base_dir)?)
}

/// The source operator embedded in an adjoint manifest, if any.
pub fn manifest_source(document: &str) -> Result<Option<WgsOperator>> {
    match parse_value(document)?.get("source") {
        Some(v) => operator_from_value(v.clone())
            .map(Some)
            .map_err(|e| Error::Validation(format!("source: {e}"))),
        None => Ok(None),
    }
}

pub fn save_sum(s: &SumOperator) -> String {
    let terms: Vec<OperatorDocument> = s.terms().iter().map(OperatorDocument::from).collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "terms": terms,
    }))
    .expect("sums serialize")
}

#[derive(Debug, Serialize)]
pub struct AdjointManifest<'a> {
    pub schema_version: &'static str,
    pub n: usize,
    pub term_count: usize,
    pub psi: usize,
    /// `|C_β|` per β.
    pub fiber_counts: &'a [usize],
    pub source_norm: Real,
    pub source: OperatorDocument,
    pub terms: Vec<String>,
}

impl<'a> AdjointManifest<'a> {
    pub fn new(source: &WgsOperator, d: &'a DecompositionResult, term_files: Vec<String>) -> Self {
        AdjointManifest {
            schema_version: "1",
            n: d.n(),
            term_count: d.len(),
            psi: d.psi(),
            fiber_counts: d.fiber_counts(),
            source_norm: Real(d.source_norm()),
            source: OperatorDocument::from(source),
            terms: term_files,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize")
    }
}
