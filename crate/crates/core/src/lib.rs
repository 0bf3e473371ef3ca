//! htmlsift-core: turn messy real-world HTML into clean Markdown or
//! schema-conformant JSON, score any converter's output with a full string- and
//! tree-metric suite, and drive a resumable draft-refine-critique synthesis
//! pipeline that emits SFT, critique, and preference datasets.
//!
//! The crate is organized by concern:
//!
//! - [`html`] — lenient tag-soup parsing into an immutable [`html::HtmlNode`]
//!   tree, a minimal descendant-combinator selector language, serialization,
//!   and text extraction.
//! - [`markdown`] — boilerplate stripping, main-content scoring, and
//!   instruction-driven conversion to GitHub-Flavored Markdown.
//! - [`json_extract`] — restricted JSON schemas, declarative extraction
//!   templates, validation, and canonical leaf node-sets for tree comparison.
//! - [`metrics`] — ROUGE-L, normalized Levenshtein, OSA Damerau-Levenshtein,
//!   Jaro-Winkler, JSON precision/recall/F1/pass, and report aggregation.
//! - [`corpus`] — corpus ingestion, trigram language detection, token-length
//!   statistics, and length-curriculum planning.
//! - [`pipeline`] — pluggable generation backends and the three-stage
//!   draft-refine-critique runner with append-only, resumable stage logs.
//! - [`synthgen`] — deterministic synthetic HTML/tree generators used by
//!   benchmarks, property tests, and throughput checks.

pub mod corpus;
pub mod html;
pub mod json_extract;
pub mod jsonl;
pub mod markdown;
pub mod metrics;
pub mod pipeline;
pub mod synthgen;

pub use html::{parse_html, HtmlNode, Selector};
pub use json_extract::{extract_json, to_node_set, validate, JsonSchemaSpec};
pub use markdown::{convert, ExtractionInstruction, MarkdownDoc};
pub use metrics::{
    damerau_abs, jaro_winkler, json_metrics, levenshtein_norm, rouge_l, JsonMetricReport,
    MetricReport,
};
