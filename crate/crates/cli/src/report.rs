//! Versioned, byte-reproducible reports.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::inputs::InputFile;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 over the normalized parameters and every input file.
    pub inputs_sha256: String,
    pub tool_version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub schema_version: u32,
    pub payload: Value,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Hash of `(name, value)` parameters and labelled input files, each field
/// length-prefixed so that no two distinct inputs collide by concatenation.
pub fn inputs_hash(params: &[(&str, String)], files: &[&InputFile]) -> String {
    let mut h = Sha256::new();
    let mut field = |bytes: &[u8]| {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    };
    for (k, v) in params {
        field(k.as_bytes());
        field(v.as_bytes());
    }
    for f in files {
        field(f.label.as_bytes());
        field(&f.bytes);
    }
    hex::encode(h.finalize())
}

pub fn to_payload<T: Serialize>(x: &T) -> Result<Value, CliError> {
    // `serde_json::Map` is ordered by key, so every object comes out sorted.
    serde_json::to_value(x).map_err(|e| CliError::Internal(e.to_string()))
}

fn schema_for(kind: &str) -> Option<&'static str> {
    Some(match kind {
        "classify" => include_str!("../../../docs/schemas/classify.json"),
        "critical-modulus" => include_str!("../../../docs/schemas/critical-modulus.json"),
        "sz-margin" => include_str!("../../../docs/schemas/sz-margin.json"),
        "build-domain4" => include_str!("../../../docs/schemas/build-domain4.json"),
        "monomial-extend" => include_str!("../../../docs/schemas/monomial-extend.json"),
        "witness" => include_str!("../../../docs/schemas/witness.json"),
        "gaps" => include_str!("../../../docs/schemas/gaps.json"),
        "laurent" => include_str!("../../../docs/schemas/laurent.json"),
        _ => return None,
    })
}

fn type_matches(v: &Value, ty: &str) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => true,
    }
}

/// Checks `type`, `required`, `properties` and `const` recursively: the
/// subset of JSON Schema the shipped schemas use.
fn validate(v: &Value, schema: &Value, path: &str) -> Result<(), String> {
    let Some(s) = schema.as_object() else {
        return Ok(());
    };
    if let Some(ty) = s.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(v, t),
            Value::Array(ts) => ts
                .iter()
                .filter_map(Value::as_str)
                .any(|t| type_matches(v, t)),
            _ => true,
        };
        if !ok {
            return Err(format!("{path}: expected type {ty}"));
        }
    }
    if let Some(c) = s.get("const") {
        if v != c {
            return Err(format!("{path}: expected {c}"));
        }
    }
    if let (Some(obj), Some(req)) = (v.as_object(), s.get("required").and_then(Value::as_array)) {
        for key in req.iter().filter_map(Value::as_str) {
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing required key {key:?}"));
            }
        }
    }
    if let (Some(obj), Some(props)) = (
        v.as_object(),
        s.get("properties").and_then(Value::as_object),
    ) {
        for (key, sub) in props {
            if let Some(child) = obj.get(key) {
                validate(child, sub, &format!("{path}.{key}"))?;
            }
        }
    }
    Ok(())
}

/// Validates the whole report against the versioned schema of its kind.
pub fn validate_report(r: &Report) -> Result<(), CliError> {
    let schema_text = schema_for(&r.kind)
        .ok_or_else(|| CliError::SchemaViolation(format!("unknown report kind {:?}", r.kind)))?;
    let schema: Value =
        serde_json::from_str(schema_text).map_err(|e| CliError::Internal(e.to_string()))?;
    validate(&to_payload(r)?, &schema, "report").map_err(CliError::SchemaViolation)
}

fn text_lines(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                match child {
                    Value::Object(_) => text_lines(child, &key, out),
                    _ => out.push_str(&format!("{key} = {child}\n")),
                }
            }
        }
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

/// Serializes a validated report. JSON is pretty-printed with sorted keys
/// and shortest round-trip floats; text flattens the payload to
/// `key = value` lines; CSV is only defined for tabular payloads.
pub fn render_report(r: &Report, fmt: Format) -> Result<Vec<u8>, CliError> {
    validate_report(r)?;
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&to_payload(r)?)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Text => {
            let mut out = format!("kind = {}\nschema_version = {}\n", r.kind, r.schema_version);
            text_lines(&r.payload, "", &mut out);
            let mut prov = Map::new();
            prov.insert("provenance".into(), to_payload(&r.provenance)?);
            text_lines(&Value::Object(prov), "", &mut out);
            Ok(out.into_bytes())
        }
        Format::Csv => {
            let rows = r
                .payload
                .get("rows")
                .and_then(Value::as_array)
                .ok_or_else(|| CliError::Input(format!("{} reports have no CSV form", r.kind)))?;
            let header: Vec<String> = r
                .payload
                .get("columns")
                .and_then(Value::as_array)
                .map(|c| {
                    c.iter()
                        .filter_map(|x| x.as_str().map(String::from))
                        .collect()
                })
                .unwrap_or_default();
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Internal(e.to_string());
            w.write_record(&header).map_err(io)?;
            for row in rows {
                let cells: Vec<String> = header
                    .iter()
                    .map(|h| match row.get(h) {
                        Some(Value::String(s)) => s.clone(),
                        Some(v) => v.to_string(),
                        None => String::new(),
                    })
                    .collect();
                w.write_record(&cells).map_err(io)?;
            }
            w.into_inner()
                .map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report {
            kind: "gaps".into(),
            schema_version: SCHEMA_VERSION,
            payload: json!({"gap_set": {"epsilon": 0.1, "horizon": 5, "members": [0], "max_gap": 0,
                "exhaustive": true, "nonempty": true}, "turns": [0.25]}),
            provenance: Provenance {
                inputs_sha256: "00".into(),
                tool_version: "0".into(),
                seed: 0,
                wall_time_s: None,
            },
        }
    }

    #[test]
    fn json_is_sorted_and_stable() {
        let r = sample();
        let a = render_report(&r, Format::Json).unwrap();
        let b = render_report(&r, Format::Json).unwrap();
        assert_eq!(a, b);
        let s = String::from_utf8(a).unwrap();
        let kind = s.find("\"kind\"").unwrap();
        let payload = s.find("\"payload\"").unwrap();
        let prov = s.find("\"provenance\"").unwrap();
        assert!(kind < payload && payload < prov);
    }

    #[test]
    fn schema_violations() {
        let mut r = sample();
        r.payload = json!({"turns": [0.25]});
        assert!(matches!(
            render_report(&r, Format::Json),
            Err(CliError::SchemaViolation(_))
        ));
        let mut r = sample();
        r.schema_version = 99;
        assert!(matches!(
            render_report(&r, Format::Json),
            Err(CliError::SchemaViolation(_))
        ));
        let mut r = sample();
        r.kind = "nope".into();
        assert!(render_report(&r, Format::Json).is_err());
    }

    #[test]
    fn hash_is_injective_on_field_boundaries() {
        let a = inputs_hash(&[("ab", "c".into())], &[]);
        let b = inputs_hash(&[("a", "bc".into())], &[]);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}
