//! Schema-guided JSON extraction from HTML.
//!
//! A [`JsonSchemaSpec`] is a restricted schema (object / array / string /
//! number / integer / boolean, with `properties`, `required`, `items`, and
//! `enum`). An [`ExtractionTemplate`] maps schema field paths to CSS-subset
//! selectors plus a capture and coercion rule; [`extract_json`] evaluates the
//! template against a parsed document and produces a JSON value that always
//! validates against the schema. [`validate`] reports every violation, and
//! [`node_set`] provides the canonical leaf-set used for tree comparison.

pub mod node_set;

pub use node_set::{canon_eq, canonicalize_str, to_node_set, CanonValue, JsonNodeSet};

use crate::html::{select, HtmlNode, Selector};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

/// A restricted JSON schema node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum JsonSchemaSpec {
    Object {
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        properties: BTreeMap<String, JsonSchemaSpec>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        required: Vec<String>,
    },
    Array {
        items: Box<JsonSchemaSpec>,
    },
    String {
        #[serde(default, rename = "enum", skip_serializing_if = "Option::is_none")]
        allowed: Option<Vec<Value>>,
    },
    Number {
        #[serde(default, rename = "enum", skip_serializing_if = "Option::is_none")]
        allowed: Option<Vec<Value>>,
    },
    Integer {
        #[serde(default, rename = "enum", skip_serializing_if = "Option::is_none")]
        allowed: Option<Vec<Value>>,
    },
    Boolean {
        #[serde(default, rename = "enum", skip_serializing_if = "Option::is_none")]
        allowed: Option<Vec<Value>>,
    },
}

impl JsonSchemaSpec {
    /// Parses a schema from JSON text and checks its structural invariants.
    pub fn from_json(text: &str) -> Result<JsonSchemaSpec, SchemaError> {
        let spec: JsonSchemaSpec =
            serde_json::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            JsonSchemaSpec::Object { .. } => "object",
            JsonSchemaSpec::Array { .. } => "array",
            JsonSchemaSpec::String { .. } => "string",
            JsonSchemaSpec::Number { .. } => "number",
            JsonSchemaSpec::Integer { .. } => "integer",
            JsonSchemaSpec::Boolean { .. } => "boolean",
        }
    }

    fn allowed_values(&self) -> Option<&[Value]> {
        match self {
            JsonSchemaSpec::String { allowed }
            | JsonSchemaSpec::Number { allowed }
            | JsonSchemaSpec::Integer { allowed }
            | JsonSchemaSpec::Boolean { allowed } => allowed.as_deref(),
            _ => None,
        }
    }

    /// Checks `required ⊆ properties` and that `enum` values conform to the
    /// node's own type, recursively.
    pub fn check(&self) -> Result<(), SchemaError> {
        self.check_at("")
    }

    fn check_at(&self, path: &str) -> Result<(), SchemaError> {
        match self {
            JsonSchemaSpec::Object {
                properties,
                required,
            } => {
                for name in required {
                    if !properties.contains_key(name) {
                        return Err(SchemaError::Invalid {
                            path: path.to_string(),
                            message: format!("required key `{name}` not in properties"),
                        });
                    }
                }
                for (name, child) in properties {
                    child.check_at(&join_path(path, name))?;
                }
                Ok(())
            }
            JsonSchemaSpec::Array { items } => items.check_at(&join_path(path, "items")),
            scalar => {
                if let Some(values) = scalar.allowed_values() {
                    if values.is_empty() {
                        return Err(SchemaError::Invalid {
                            path: path.to_string(),
                            message: "empty enum".to_string(),
                        });
                    }
                    for v in values {
                        if !scalar_matches_type(v, scalar) {
                            return Err(SchemaError::Invalid {
                                path: path.to_string(),
                                message: format!(
                                    "enum value {v} does not conform to type {}",
                                    scalar.type_name()
                                ),
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("schema parse error: {0}")]
    Parse(String),
    #[error("invalid schema at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn join_path(path: &str, key: &str) -> String {
    let escaped = key.replace('~', "~0").replace('/', "~1");
    if path.is_empty() {
        escaped
    } else {
        format!("{path}/{escaped}")
    }
}

fn scalar_matches_type(value: &Value, schema: &JsonSchemaSpec) -> bool {
    match schema {
        JsonSchemaSpec::String { .. } => value.is_string(),
        JsonSchemaSpec::Boolean { .. } => value.is_boolean(),
        JsonSchemaSpec::Number { .. } => value.is_number(),
        JsonSchemaSpec::Integer { .. } => match value {
            Value::Number(n) => {
                n.is_i64() || n.is_u64() || n.as_f64().is_some_and(|f| f.fract() == 0.0)
            }
            _ => false,
        },
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One schema violation: where and what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// Result of [`validate`]: `ok` plus the complete violation list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks a JSON value against a schema, collecting every violation (type
/// mismatches, missing required keys, enum mismatches). Properties not named
/// in the schema are allowed and ignored. `null` never satisfies any type in
/// this restricted schema.
pub fn validate(value: &Value, schema: &JsonSchemaSpec) -> ValidationReport {
    let mut violations = Vec::new();
    validate_at(value, schema, "", &mut violations);
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn validate_at(value: &Value, schema: &JsonSchemaSpec, path: &str, out: &mut Vec<Violation>) {
    match schema {
        JsonSchemaSpec::Object {
            properties,
            required,
        } => {
            let Value::Object(map) = value else {
                out.push(type_mismatch(path, "object", value));
                return;
            };
            for name in required {
                if !map.contains_key(name) {
                    out.push(Violation {
                        path: join_path(path, name),
                        message: "missing required property".to_string(),
                    });
                }
            }
            for (name, child_schema) in properties {
                if let Some(child) = map.get(name) {
                    validate_at(child, child_schema, &join_path(path, name), out);
                }
            }
        }
        JsonSchemaSpec::Array { items } => {
            let Value::Array(list) = value else {
                out.push(type_mismatch(path, "array", value));
                return;
            };
            for (i, child) in list.iter().enumerate() {
                validate_at(child, items, &join_path(path, &i.to_string()), out);
            }
        }
        scalar => {
            if !scalar_matches_type(value, scalar) {
                out.push(type_mismatch(path, scalar.type_name(), value));
                return;
            }
            if let Some(allowed) = scalar.allowed_values() {
                let ok = allowed.iter().any(|candidate| json_scalar_eq(candidate, value));
                if !ok {
                    out.push(Violation {
                        path: path.to_string(),
                        message: format!("value {value} not in enum"),
                    });
                }
            }
        }
    }
}

fn type_mismatch(path: &str, expected: &str, got: &Value) -> Violation {
    Violation {
        path: path.to_string(),
        message: format!("type-mismatch: expected {expected}, got {}", value_kind(got)),
    }
}

fn value_kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// Scalar equality for enum membership: numbers compare canonically
/// (tolerant), everything else exactly.
fn json_scalar_eq(a: &Value, b: &Value) -> bool {
    match (CanonValue::from_scalar(a), CanonValue::from_scalar(b)) {
        (Some(ca), Some(cb)) => canon_eq(&ca, &cb),
        _ => a == b,
    }
}

// ---------------------------------------------------------------------------
// Extraction templates
// ---------------------------------------------------------------------------

/// How to turn selector matches into a raw captured string (or strings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capture {
    /// Collapsed inner text of the first match.
    Text,
    /// Named attribute of the first match (missing attribute → field absent).
    Attribute(String),
    /// Collapsed inner text of every match, in document order.
    List,
}

/// Target scalar type of a captured string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoerceKind {
    String,
    Number,
    Integer,
    Boolean,
}

impl fmt::Display for CoerceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CoerceKind::String => "string",
            CoerceKind::Number => "number",
            CoerceKind::Integer => "integer",
            CoerceKind::Boolean => "boolean",
        };
        f.write_str(name)
    }
}

/// One extraction rule: output field path, node selector, capture, coercion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateRule {
    pub path: Vec<String>,
    pub selector: Selector,
    pub capture: Capture,
    pub coerce: CoerceKind,
}

/// Ordered rule list; serializes as a bare JSON array.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtractionTemplate {
    pub rules: Vec<TemplateRule>,
}

impl ExtractionTemplate {
    pub fn from_json(text: &str) -> Result<ExtractionTemplate, ExtractError> {
        serde_json::from_str(text).map_err(|e| ExtractError::TemplateMismatch {
            path: String::new(),
            message: format!("template parse error: {e}"),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("template/schema mismatch at `{path}`: {message}")]
    TemplateMismatch { path: String, message: String },
    #[error("required field missing: `{path}`")]
    RequiredFieldMissing { path: String },
    #[error("cannot coerce `{raw}` at `{path}` to {target}")]
    CoercionFailure {
        path: String,
        raw: String,
        target: String,
    },
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Evaluates a template against a document. The output validates against
/// `schema`: optional fields whose selectors match nothing are omitted;
/// missing required fields are an error, never null-filled.
pub fn extract_json(
    root: &HtmlNode,
    schema: &JsonSchemaSpec,
    template: &ExtractionTemplate,
) -> Result<Value, ExtractError> {
    schema.check().map_err(|e| ExtractError::TemplateMismatch {
        path: String::new(),
        message: e.to_string(),
    })?;

    let mut assembled = match schema {
        JsonSchemaSpec::Object { .. } => Value::Object(Map::new()),
        _ => Value::Null, // scalar/array root: filled by a rule with empty path
    };
    let mut root_set = false;

    for rule in &template.rules {
        let display_path = rule.path.join("/");
        let field_schema = resolve_field_schema(schema, &rule.path)?;
        check_rule_against_schema(rule, field_schema, &display_path)?;

        let value = match &rule.capture {
            Capture::Text => {
                let matches = select(root, &rule.selector);
                match matches.first() {
                    Some(node) => Some(coerce_checked(
                        &node.inner_text(),
                        rule.coerce,
                        field_schema,
                        &display_path,
                    )?),
                    None => None,
                }
            }
            Capture::Attribute(name) => {
                let matches = select(root, &rule.selector);
                match matches.first().and_then(|node| node.attr(name)) {
                    Some(raw) => Some(coerce_checked(
                        raw,
                        rule.coerce,
                        field_schema,
                        &display_path,
                    )?),
                    None => None,
                }
            }
            Capture::List => {
                let JsonSchemaSpec::Array { items } = field_schema else {
                    unreachable!("checked by check_rule_against_schema");
                };
                let mut out = Vec::new();
                for node in select(root, &rule.selector) {
                    out.push(coerce_checked(
                        &node.inner_text(),
                        rule.coerce,
                        items,
                        &display_path,
                    )?);
                }
                Some(Value::Array(out))
            }
        };

        if let Some(value) = value {
            if rule.path.is_empty() {
                if root_set {
                    return Err(ExtractError::TemplateMismatch {
                        path: display_path,
                        message: "multiple rules assign the root value".to_string(),
                    });
                }
                assembled = value;
                root_set = true;
            } else {
                insert_at_path(&mut assembled, &rule.path, value, &display_path)?;
            }
        }
    }

    check_required(Some(&assembled), schema, "")?;
    Ok(assembled)
}

/// Walks the schema along an object-property path.
fn resolve_field_schema<'s>(
    schema: &'s JsonSchemaSpec,
    path: &[String],
) -> Result<&'s JsonSchemaSpec, ExtractError> {
    let mut current = schema;
    for (i, key) in path.iter().enumerate() {
        let JsonSchemaSpec::Object { properties, .. } = current else {
            return Err(ExtractError::TemplateMismatch {
                path: path[..i].join("/"),
                message: "template path descends into a non-object schema node".to_string(),
            });
        };
        current = properties
            .get(key)
            .ok_or_else(|| ExtractError::TemplateMismatch {
                path: path[..=i].join("/"),
                message: "field path not present in schema".to_string(),
            })?;
    }
    Ok(current)
}

fn check_rule_against_schema(
    rule: &TemplateRule,
    field_schema: &JsonSchemaSpec,
    display_path: &str,
) -> Result<(), ExtractError> {
    let mismatch = |message: String| ExtractError::TemplateMismatch {
        path: display_path.to_string(),
        message,
    };
    let scalar_target = |schema: &JsonSchemaSpec| -> Result<CoerceKind, ExtractError> {
        match schema {
            JsonSchemaSpec::String { .. } => Ok(CoerceKind::String),
            JsonSchemaSpec::Number { .. } => Ok(CoerceKind::Number),
            JsonSchemaSpec::Integer { .. } => Ok(CoerceKind::Integer),
            JsonSchemaSpec::Boolean { .. } => Ok(CoerceKind::Boolean),
            other => Err(mismatch(format!(
                "capture targets a {} schema node",
                other.type_name()
            ))),
        }
    };
    match &rule.capture {
        Capture::List => {
            let JsonSchemaSpec::Array { items } = field_schema else {
                return Err(mismatch(format!(
                    "list capture requires an array field, schema has {}",
                    field_schema.type_name()
                )));
            };
            let expected = scalar_target(items)?;
            if rule.coerce != expected {
                return Err(mismatch(format!(
                    "coerce {} does not match array item type {expected}",
                    rule.coerce
                )));
            }
        }
        Capture::Text | Capture::Attribute(_) => {
            if matches!(field_schema, JsonSchemaSpec::Array { .. }) {
                return Err(mismatch(
                    "array fields require list capture".to_string(),
                ));
            }
            let expected = scalar_target(field_schema)?;
            if rule.coerce != expected {
                return Err(mismatch(format!(
                    "coerce {} does not match schema type {expected}",
                    rule.coerce
                )));
            }
        }
    }
    Ok(())
}

/// Coerces a raw captured string and enforces any enum constraint.
fn coerce_checked(
    raw: &str,
    target: CoerceKind,
    field_schema: &JsonSchemaSpec,
    path: &str,
) -> Result<Value, ExtractError> {
    let trimmed = raw.trim();
    let fail = || ExtractError::CoercionFailure {
        path: path.to_string(),
        raw: raw.to_string(),
        target: target.to_string(),
    };
    let value = match target {
        CoerceKind::String => Value::String(trimmed.to_string()),
        CoerceKind::Integer => {
            let n: i64 = trimmed.parse().map_err(|_| fail())?;
            Value::Number(Number::from(n))
        }
        CoerceKind::Number => {
            let f: f64 = trimmed.parse().map_err(|_| fail())?;
            Value::Number(Number::from_f64(f).ok_or_else(fail)?)
        }
        CoerceKind::Boolean => match trimmed {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(fail()),
        },
    };
    if let Some(allowed) = field_schema.allowed_values() {
        if !allowed.iter().any(|candidate| json_scalar_eq(candidate, &value)) {
            return Err(fail());
        }
    }
    Ok(value)
}

/// Inserts a value at a key path, creating intermediate objects.
fn insert_at_path(
    root: &mut Value,
    path: &[String],
    value: Value,
    display_path: &str,
) -> Result<(), ExtractError> {
    let mut current = root;
    for key in &path[..path.len() - 1] {
        let Value::Object(map) = current else {
            return Err(ExtractError::TemplateMismatch {
                path: display_path.to_string(),
                message: "path collides with a non-object value".to_string(),
            });
        };
        current = map
            .entry(key.clone())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let Value::Object(map) = current else {
        return Err(ExtractError::TemplateMismatch {
            path: display_path.to_string(),
            message: "path collides with a non-object value".to_string(),
        });
    };
    let last = path.last().expect("non-empty path").clone();
    if map.insert(last, value).is_some() {
        return Err(ExtractError::TemplateMismatch {
            path: display_path.to_string(),
            message: "two rules assign the same field".to_string(),
        });
    }
    Ok(())
}

/// Verifies every required field reachable through present objects, and the
/// root itself, exists in the assembled value.
fn check_required(
    value: Option<&Value>,
    schema: &JsonSchemaSpec,
    path: &str,
) -> Result<(), ExtractError> {
    match schema {
        JsonSchemaSpec::Object {
            properties,
            required,
        } => {
            let Some(value) = value else {
                // Absent optional object: fine unless it transitively
                // requires fields, which only matters when it is itself
                // required — handled by the parent.
                return Ok(());
            };
            let Value::Object(map) = value else {
                return Ok(()); // type errors surface through validate()
            };
            for name in required {
                if !map.contains_key(name) {
                    return Err(ExtractError::RequiredFieldMissing {
                        path: join_path(path, name),
                    });
                }
            }
            for (name, child_schema) in properties {
                check_required(map.get(name), child_schema, &join_path(path, name))?;
            }
            Ok(())
        }
        _ => {
            // Absence of an optional field is the parent's concern (its
            // `required` loop). `Null` only ever appears as the untouched
            // scalar/array root placeholder, meaning no rule filled it.
            if matches!(value, Some(Value::Null)) {
                return Err(ExtractError::RequiredFieldMissing {
                    path: path.to_string(),
                });
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::html::parse_str;
    use serde_json::json;

    fn schema(v: Value) -> JsonSchemaSpec {
        serde_json::from_value(v).unwrap()
    }

    fn rule(path: &[&str], selector: &str, capture: Capture, coerce: CoerceKind) -> TemplateRule {
        TemplateRule {
            path: path.iter().map(|s| s.to_string()).collect(),
            selector: Selector::parse(selector).unwrap(),
            capture,
            coerce,
        }
    }

    #[test]
    fn price_span_coerces_to_number() {
        let root = parse_str("<div><span class=\"price\">42.50</span></div>");
        let s = schema(json!({
            "type": "object",
            "properties": { "price": { "type": "number" } },
            "required": ["price"]
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["price"], ".price", Capture::Text, CoerceKind::Number)],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        assert_eq!(v, json!({ "price": 42.5 }));
        assert!(validate(&v, &s).ok);
    }

    #[test]
    fn empty_object_schema_extracts_empty_object() {
        let root = parse_str("<p>anything</p>");
        let s = schema(json!({ "type": "object" }));
        let v = extract_json(&root, &s, &ExtractionTemplate::default()).unwrap();
        assert_eq!(v, json!({}));
    }

    #[test]
    fn missing_required_field_is_an_error() {
        let root = parse_str("<p>no price here</p>");
        let s = schema(json!({
            "type": "object",
            "properties": { "price": { "type": "number" } },
            "required": ["price"]
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["price"], ".price", Capture::Text, CoerceKind::Number)],
        };
        let err = extract_json(&root, &s, &t).unwrap_err();
        assert!(matches!(
            err,
            ExtractError::RequiredFieldMissing { path } if path == "price"
        ));
    }

    #[test]
    fn missing_optional_field_is_omitted() {
        let root = parse_str("<p>plain</p>");
        let s = schema(json!({
            "type": "object",
            "properties": {
                "title": { "type": "string" },
                "price": { "type": "number" }
            }
        }));
        let t = ExtractionTemplate {
            rules: vec![
                rule(&["title"], "p", Capture::Text, CoerceKind::String),
                rule(&["price"], ".price", Capture::Text, CoerceKind::Number),
            ],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        assert_eq!(v, json!({ "title": "plain" }));
    }

    #[test]
    fn attribute_capture_and_absence() {
        let root = parse_str("<a class=\"m\" href=\"/x\">t</a><a class=\"n\">u</a>");
        let s = schema(json!({
            "type": "object",
            "properties": { "link": { "type": "string" }, "other": { "type": "string" } }
        }));
        let t = ExtractionTemplate {
            rules: vec![
                rule(
                    &["link"],
                    "a.m",
                    Capture::Attribute("href".to_string()),
                    CoerceKind::String,
                ),
                rule(
                    &["other"],
                    "a.n",
                    Capture::Attribute("href".to_string()),
                    CoerceKind::String,
                ),
            ],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        assert_eq!(v, json!({ "link": "/x" }));
    }

    #[test]
    fn list_capture_collects_all_matches_in_order() {
        let root = parse_str("<li class=\"t\">a</li><li class=\"t\">b</li>");
        let s = schema(json!({
            "type": "object",
            "properties": {
                "tags": { "type": "array", "items": { "type": "string" } }
            }
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["tags"], ".t", Capture::List, CoerceKind::String)],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        assert_eq!(v, json!({ "tags": ["a", "b"] }));
    }

    #[test]
    fn list_capture_with_no_matches_yields_empty_array() {
        let root = parse_str("<p>x</p>");
        let s = schema(json!({
            "type": "object",
            "properties": {
                "tags": { "type": "array", "items": { "type": "string" } }
            }
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["tags"], ".t", Capture::List, CoerceKind::String)],
        };
        assert_eq!(extract_json(&root, &s, &t).unwrap(), json!({ "tags": [] }));
    }

    #[test]
    fn nested_paths_create_intermediate_objects() {
        let root = parse_str("<span id=\"n\">Widget</span>");
        let s = schema(json!({
            "type": "object",
            "properties": {
                "product": {
                    "type": "object",
                    "properties": { "name": { "type": "string" } },
                    "required": ["name"]
                }
            },
            "required": ["product"]
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(
                &["product", "name"],
                "#n",
                Capture::Text,
                CoerceKind::String,
            )],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        assert_eq!(v, json!({ "product": { "name": "Widget" } }));
    }

    #[test]
    fn coercion_failure_reports_raw_text() {
        let root = parse_str("<span class=\"price\">not a number</span>");
        let s = schema(json!({
            "type": "object",
            "properties": { "price": { "type": "number" } }
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["price"], ".price", Capture::Text, CoerceKind::Number)],
        };
        let err = extract_json(&root, &s, &t).unwrap_err();
        assert!(matches!(err, ExtractError::CoercionFailure { raw, .. } if raw == "not a number"));
    }

    #[test]
    fn integer_and_boolean_coercions_are_strict() {
        let root = parse_str("<i id=\"a\">12</i><i id=\"b\">true</i><i id=\"c\">12.5</i>");
        let s = schema(json!({
            "type": "object",
            "properties": { "n": { "type": "integer" }, "f": { "type": "boolean" } }
        }));
        let ok = ExtractionTemplate {
            rules: vec![
                rule(&["n"], "#a", Capture::Text, CoerceKind::Integer),
                rule(&["f"], "#b", Capture::Text, CoerceKind::Boolean),
            ],
        };
        assert_eq!(
            extract_json(&root, &s, &ok).unwrap(),
            json!({ "n": 12, "f": true })
        );
        let bad = ExtractionTemplate {
            rules: vec![rule(&["n"], "#c", Capture::Text, CoerceKind::Integer)],
        };
        assert!(matches!(
            extract_json(&root, &s, &bad),
            Err(ExtractError::CoercionFailure { .. })
        ));
    }

    #[test]
    fn enum_constraint_enforced_at_capture() {
        let root = parse_str("<span class=\"c\">purple</span>");
        let s = schema(json!({
            "type": "object",
            "properties": {
                "color": { "type": "string", "enum": ["red", "green"] }
            }
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["color"], ".c", Capture::Text, CoerceKind::String)],
        };
        assert!(matches!(
            extract_json(&root, &s, &t),
            Err(ExtractError::CoercionFailure { .. })
        ));
    }

    #[test]
    fn template_path_outside_schema_is_a_mismatch() {
        let root = parse_str("<p>x</p>");
        let s = schema(json!({ "type": "object" }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["ghost"], "p", Capture::Text, CoerceKind::String)],
        };
        assert!(matches!(
            extract_json(&root, &s, &t),
            Err(ExtractError::TemplateMismatch { .. })
        ));
    }

    #[test]
    fn list_capture_on_scalar_field_is_a_mismatch() {
        let root = parse_str("<p>x</p>");
        let s = schema(json!({
            "type": "object",
            "properties": { "name": { "type": "string" } }
        }));
        let t = ExtractionTemplate {
            rules: vec![rule(&["name"], "p", Capture::List, CoerceKind::String)],
        };
        assert!(matches!(
            extract_json(&root, &s, &t),
            Err(ExtractError::TemplateMismatch { .. })
        ));
    }

    #[test]
    fn extraction_output_always_validates() {
        let root = parse_str(
            "<h1 class=\"t\">Widget</h1><span class=\"price\">9.99</span>\
             <li class=\"tag\">a</li><li class=\"tag\">b</li>",
        );
        let s = schema(json!({
            "type": "object",
            "properties": {
                "title": { "type": "string" },
                "price": { "type": "number" },
                "tags": { "type": "array", "items": { "type": "string" } }
            },
            "required": ["title"]
        }));
        let t = ExtractionTemplate {
            rules: vec![
                rule(&["title"], ".t", Capture::Text, CoerceKind::String),
                rule(&["price"], ".price", Capture::Text, CoerceKind::Number),
                rule(&["tags"], ".tag", Capture::List, CoerceKind::String),
            ],
        };
        let v = extract_json(&root, &s, &t).unwrap();
        let report = validate(&v, &s);
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn validate_accepts_and_rejects_per_spec_examples() {
        let s = schema(json!({
            "type": "object",
            "properties": { "a": { "type": "integer" } },
            "required": ["a"]
        }));
        assert!(validate(&json!({ "a": 1 }), &s).ok);
        let bad = validate(&json!({ "a": "x" }), &s);
        assert!(!bad.ok);
        assert_eq!(bad.violations.len(), 1);
        assert_eq!(bad.violations[0].path, "a");
        assert!(bad.violations[0].message.contains("type-mismatch"));
    }

    #[test]
    fn validate_collects_all_violations() {
        let s = schema(json!({
            "type": "object",
            "properties": {
                "items": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": { "name": { "type": "string" } },
                        "required": ["name"]
                    }
                },
                "count": { "type": "integer" }
            },
            "required": ["count"]
        }));
        let v = json!({
            "items": [ {"name": "a"}, {"name": "b"}, {"name": 3} ]
        });
        let report = validate(&v, &s);
        assert!(!report.ok);
        let paths: Vec<&str> = report.violations.iter().map(|v| v.path.as_str()).collect();
        assert!(paths.contains(&"items/2/name"));
        assert!(paths.contains(&"count"));
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn validate_integer_accepts_whole_floats_and_rejects_null() {
        let s = schema(json!({
            "type": "object",
            "properties": { "n": { "type": "integer" }, "s": { "type": "string" } }
        }));
        assert!(validate(&json!({ "n": 3.0 }), &s).ok);
        assert!(!validate(&json!({ "n": 3.5 }), &s).ok);
        assert!(!validate(&json!({ "s": null }), &s).ok);
    }

    #[test]
    fn validate_allows_extra_properties() {
        let s = schema(json!({
            "type": "object",
            "properties": { "a": { "type": "integer" } }
        }));
        assert!(validate(&json!({ "a": 1, "zzz": [1, 2] }), &s).ok);
    }

    #[test]
    fn schema_invariants_are_checked() {
        assert!(JsonSchemaSpec::from_json(
            r#"{ "type": "object", "required": ["ghost"] }"#
        )
        .is_err());
        assert!(JsonSchemaSpec::from_json(
            r#"{ "type": "integer", "enum": ["red"] }"#
        )
        .is_err());
        assert!(JsonSchemaSpec::from_json(
            r#"{ "type": "object", "properties": { "a": { "type": "string" } }, "required": ["a"] }"#
        )
        .is_ok());
    }

    #[test]
    fn template_round_trips_through_json() {
        let t = ExtractionTemplate {
            rules: vec![
                rule(&["a", "b"], "div.x p", Capture::Text, CoerceKind::String),
                rule(
                    &["u"],
                    "a",
                    Capture::Attribute("href".to_string()),
                    CoerceKind::String,
                ),
                rule(&["l"], ".i", Capture::List, CoerceKind::Integer),
            ],
        };
        let text = serde_json::to_string(&t).unwrap();
        let back = ExtractionTemplate::from_json(&text).unwrap();
        assert_eq!(back, t);
    }
}
