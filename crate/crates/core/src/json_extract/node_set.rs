//! Leaf node-sets for JSON tree comparison.
//!
//! A JSON value flattens to a set of `(path, canonical scalar)` pairs: one
//! entry per leaf, where paths join object keys and zero-based array indices
//! with `/` (keys escape `~` as `~0` and `/` as `~1`, JSON-Pointer style).
//! Empty containers contribute sentinel leaves (`{}` / `[]`) so that
//! `{"a":{}}` and `{"a":null}` stay distinguishable. A bare scalar at the
//! root gets the empty path.

use serde_json::Value;
use std::collections::BTreeMap;
use unicode_normalization::UnicodeNormalization;

/// Relative tolerance for float comparison in [`canon_eq`].
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Path → canonical leaf value. `BTreeMap` keeps iteration deterministic.
pub type JsonNodeSet = BTreeMap<String, CanonValue>;

/// A JSON scalar in canonical form: strings are NFC-normalized and trimmed,
/// integers kept exact, floats compared with relative tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonValue {
    Str(String),
    Int(i128),
    Float(f64),
    Bool(bool),
    Null,
    EmptyObject,
    EmptyArray,
}

impl CanonValue {
    pub fn from_scalar(value: &Value) -> Option<CanonValue> {
        match value {
            Value::Null => Some(CanonValue::Null),
            Value::Bool(b) => Some(CanonValue::Bool(*b)),
            Value::Number(n) => Some(if let Some(i) = n.as_i64() {
                CanonValue::Int(i128::from(i))
            } else if let Some(u) = n.as_u64() {
                CanonValue::Int(i128::from(u))
            } else {
                CanonValue::Float(n.as_f64().unwrap_or(f64::NAN))
            }),
            Value::String(s) => Some(CanonValue::Str(canonicalize_str(s))),
            Value::Object(_) | Value::Array(_) => None,
        }
    }
}

/// Trims surrounding whitespace and applies Unicode NFC.
pub fn canonicalize_str(s: &str) -> String {
    s.trim().nfc().collect()
}

/// Equality under canonicalization: integer/integer exact; any comparison
/// involving a float uses relative tolerance [`FLOAT_REL_TOL`], so `42` and
/// `42.0` match.
pub fn canon_eq(a: &CanonValue, b: &CanonValue) -> bool {
    use CanonValue::*;
    match (a, b) {
        (Int(x), Int(y)) => x == y,
        (Int(_) | Float(_), Int(_) | Float(_)) => {
            let x = to_f64(a);
            let y = to_f64(b);
            if x == y {
                return true;
            }
            (x - y).abs() <= FLOAT_REL_TOL * x.abs().max(y.abs())
        }
        (Str(x), Str(y)) => x == y,
        (Bool(x), Bool(y)) => x == y,
        (Null, Null) | (EmptyObject, EmptyObject) | (EmptyArray, EmptyArray) => true,
        _ => false,
    }
}

fn to_f64(v: &CanonValue) -> f64 {
    match v {
        CanonValue::Int(i) => *i as f64,
        CanonValue::Float(f) => *f,
        _ => f64::NAN,
    }
}

/// Escapes one path segment: `~` → `~0`, `/` → `~1`.
fn escape_key(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn join(path: &str, segment: &str) -> String {
    if path.is_empty() {
        segment.to_string()
    } else {
        format!("{path}/{segment}")
    }
}

/// Flattens a JSON value to its leaf node-set.
pub fn to_node_set(value: &Value) -> JsonNodeSet {
    let mut set = JsonNodeSet::new();
    walk(value, String::new(), &mut set);
    set
}

fn walk(value: &Value, path: String, set: &mut JsonNodeSet) {
    match value {
        Value::Object(map) if map.is_empty() => {
            set.insert(path, CanonValue::EmptyObject);
        }
        Value::Object(map) => {
            for (key, child) in map {
                walk(child, join(&path, &escape_key(key)), set);
            }
        }
        Value::Array(items) if items.is_empty() => {
            set.insert(path, CanonValue::EmptyArray);
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, join(&path, &i.to_string()), set);
            }
        }
        scalar => {
            let canon = CanonValue::from_scalar(scalar).expect("scalar by match arm");
            set.insert(path, canon);
        }
    }
}

/// Number of (path, value) pairs present in both sets with canonically equal
/// values.
pub fn intersection_size(a: &JsonNodeSet, b: &JsonNodeSet) -> usize {
    a.iter()
        .filter(|(path, value)| b.get(*path).is_some_and(|other| canon_eq(value, other)))
        .count()
}
