//! The three-stage Draft–Refine–Critique synthesis pipeline.
//!
//! A [`GenerationBackend`] (mock, scripted, or HTTP) drafts an output per
//! corpus document, a refine pass cleans it (mechanical normalization plus
//! one backend call), and a critique pass renders a binary PASS/FAIL verdict
//! with an explanation. From the three stage logs the pipeline assembles
//! three datasets:
//!
//! - **SFT-Filtered** — instruction/input/target triples for records whose
//!   refined output passed critique;
//! - **SFT-Critique** — critique training examples, negatives:positives
//!   rebalanced to 1:2;
//! - **DPO-Preference** — (chosen = refined, rejected = draft) pairs where
//!   critique passed and the refinement actually changed the draft.
//!
//! Every stage appends to a JSONL log as it goes, so an interrupted run can
//! be resumed with `resume = true` and — with deterministic backends —
//! produces byte-identical datasets to an uninterrupted run. Self-play
//! (stage 4) is a backend swap: [`self_play_round`] reruns the pipeline with
//! a new draft backend under an incremented round number.

mod backend;
mod datasets;
mod log;
mod runner;
mod stages;
mod templates;

pub use backend::{FnBackend, HttpBackend, HttpBackendConfig, MockBackend};
pub use datasets::{
    assemble_critique_dataset, assemble_dpo, assemble_sft_filtered, CritiqueExample, DatasetRow,
    DpoTriplet, JoinedRecord, SftExample,
};
pub use log::{load_stage_log, StageRow, StageStatus};
pub use runner::{
    run_pipeline, self_play_round, PipelineConfig, RunManifest, RunSummary, StageBackends,
    StageCounts,
};
pub use stages::RetryPolicy;
pub use templates::{builtin_template, PromptTemplate, Stage, StageTemplates};

use serde::{Deserialize, Serialize};

/// What the pipeline is generating for each document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Markdown,
    Json,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Markdown => write!(f, "markdown"),
            Task::Json => write!(f, "json"),
        }
    }
}

/// Decoding parameters passed to every backend call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub max_output_tokens: u32,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { max_output_tokens: 4096, temperature: 0.0, seed: None }
    }
}

/// A transient backend failure. Every `BackendError` is considered retryable
/// under the stage retry policy.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct BackendError {
    pub message: String,
}

impl BackendError {
    pub fn new(message: impl Into<String>) -> Self {
        BackendError { message: message.into() }
    }
}

/// A text-generation engine the pipeline can drive.
///
/// Implementations declaring [`deterministic`](GenerationBackend::deterministic)
/// must return identical output for identical inputs; the pipeline relies on
/// this for byte-identical reruns and fixes all dataset timestamps to the
/// epoch when every backend in a run is deterministic.
pub trait GenerationBackend: Send + Sync {
    fn name(&self) -> &str;
    fn deterministic(&self) -> bool;
    fn generate(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &GenerationParams,
    ) -> Result<String, BackendError>;
}

/// Stage-1 output: one draft per successfully processed document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftRecord {
    pub doc_id: String,
    /// The rendered instruction shown to the backend, minus the document
    /// payload (the HTML lives beside it in every assembled dataset).
    pub instruction: String,
    pub task: Task,
    pub draft_output: String,
    pub backend_name: String,
    pub timestamp: String,
}

/// Stage-2 output: the cleaned version of a draft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineRecord {
    pub doc_id: String,
    pub refined_output: String,
    /// True when the refined output differs from the original draft.
    pub changed: bool,
}

/// Stage-3 output: the binary judgment for a refined output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritiqueRecord {
    pub doc_id: String,
    pub verdict: bool,
    pub explanation: String,
}

/// Errors that abort a pipeline run (per-document failures do not; they
/// become skip rows in the stage log).
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("backend unavailable in {stage} stage: {consecutive} consecutive failures; last error: {last_error}")]
    BackendUnavailable {
        stage: String,
        consecutive: u32,
        last_error: String,
    },
    #[error("template error: {0}")]
    TemplateError(String),
    #[error("stage log {path} is corrupted at line {line}: {message}")]
    LogCorrupted {
        path: String,
        line: usize,
        message: String,
    },
    #[error("resume mismatch: {0}")]
    ResumeMismatch(String),
    #[error(transparent)]
    Jsonl(#[from] crate::jsonl::JsonlError),
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), source }
}
