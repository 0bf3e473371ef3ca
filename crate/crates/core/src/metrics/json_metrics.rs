//! JSON extraction metrics: node-set precision/recall/F1 and pass-rate.

use crate::json_extract::node_set::{intersection_size, to_node_set};
use crate::json_extract::{validate, JsonSchemaSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Per-document JSON metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonMetricReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Prediction parses as JSON and validates against the schema.
    pub pass: bool,
}

/// Scores a prediction (raw text) against a truth value under a schema.
///
/// Unparseable predictions score zero across the board with `pass=false`.
/// Otherwise precision/recall/F1 come from the canonical leaf node-set
/// intersection, and `pass` additionally requires schema validation — a
/// parseable but non-conformant prediction keeps its overlap metrics.
pub fn json_metrics(prediction_text: &str, truth: &Value, schema: &JsonSchemaSpec) -> JsonMetricReport {
    let Ok(prediction) = serde_json::from_str::<Value>(prediction_text) else {
        return JsonMetricReport {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            pass: false,
        };
    };
    let pred_set = to_node_set(&prediction);
    let truth_set = to_node_set(truth);
    let overlap = intersection_size(&pred_set, &truth_set) as f64;
    let precision = overlap / pred_set.len() as f64;
    let recall = overlap / truth_set.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    JsonMetricReport {
        precision,
        recall,
        f1,
        pass: validate(&prediction, schema).ok,
    }
}
