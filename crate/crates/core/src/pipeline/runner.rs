//! Pipeline orchestration: draft → refine → critique → assemble, with
//! resumable stage logs and a reproducibility manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::datasets::{
    assemble_critique_dataset, assemble_dpo, assemble_sft_filtered, DatasetRow, JoinedRecord,
};
use super::log::{StageRow, StageStatus};
use super::stages::{run_stage, RetryPolicy, StageFailure};
use super::templates::{instruction_of, StageTemplates};
use super::{
    io_err, CritiqueRecord, DraftRecord, GenerationBackend, GenerationParams, PipelineError,
    RefineRecord, Task,
};
use crate::corpus::CorpusDoc;
use crate::markdown::normalize_markdown;

/// Timestamp used whenever every backend in a run is deterministic, so
/// reruns are byte-identical.
const EPOCH: &str = "1970-01-01T00:00:00Z";

/// Everything a pipeline run needs besides the corpus and the backends.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub task: Task,
    /// Self-play round number; artifacts land in `out_dir/round-{round}/`.
    pub round: u32,
    pub seed: u64,
    pub jobs: usize,
    /// Continue from existing stage logs instead of starting over.
    pub resume: bool,
    pub out_dir: PathBuf,
    /// Schema text rendered into prompts; required for the json task.
    pub schema_json: Option<String>,
    pub gen_params: GenerationParams,
    pub retry: RetryPolicy,
    pub templates: StageTemplates,
}

impl PipelineConfig {
    pub fn new(task: Task, out_dir: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            task,
            round: 1,
            seed: 0,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4),
            resume: false,
            out_dir: out_dir.into(),
            schema_json: None,
            gen_params: GenerationParams::default(),
            retry: RetryPolicy::default(),
            templates: StageTemplates::builtin(task),
        }
    }
}

/// The backend driving each stage. Self-play swaps `draft` while keeping the
/// refine/critique judges fixed.
#[derive(Clone, Copy)]
pub struct StageBackends<'a> {
    pub draft: &'a dyn GenerationBackend,
    pub refine: &'a dyn GenerationBackend,
    pub critique: &'a dyn GenerationBackend,
}

impl<'a> StageBackends<'a> {
    /// One backend for all three stages.
    pub fn uniform(backend: &'a dyn GenerationBackend) -> StageBackends<'a> {
        StageBackends { draft: backend, refine: backend, critique: backend }
    }

    fn deterministic(&self) -> bool {
        self.draft.deterministic() && self.refine.deterministic() && self.critique.deterministic()
    }
}

/// Per-stage tallies recorded in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub ok: u64,
    pub skip: u64,
    pub retries: u64,
}

/// The reproducibility record written beside the datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub round: u32,
    pub task: Task,
    /// SHA-256 over the ordered doc_id list.
    pub corpus_hash: String,
    pub doc_count: u64,
    pub seed: u64,
    pub backends: BTreeMap<String, String>,
    pub deterministic: bool,
    pub template_hashes: BTreeMap<String, String>,
    pub gen_params: GenerationParams,
    pub started_at: String,
    pub finished_at: String,
    pub stage_counts: BTreeMap<String, StageCounts>,
    pub dataset_counts: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
}

/// What a completed run hands back to the caller.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: RunManifest,
    /// Directory holding the stage logs, datasets, and manifest.
    pub round_dir: PathBuf,
    /// Total documents skipped across all stages.
    pub skipped: u64,
}

/// Header written at run start; checked on resume so a log can never be
/// continued against a different corpus or seed.
#[derive(Debug, Serialize, Deserialize)]
struct RunHeader {
    round: u32,
    task: Task,
    seed: u64,
    corpus_hash: String,
    started_at: String,
}

/// SHA-256 over the ordered doc_id list.
pub(crate) fn corpus_hash(corpus: &[CorpusDoc]) -> String {
    let mut hasher = Sha256::new();
    for doc in corpus {
        hasher.update(doc.doc_id.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Collapses runs of blank lines to one and removes a non-blank line when it
/// repeats the previous non-blank line with nothing but blanks in between —
/// the "duplicated consecutive content" noise drafts are known for.
fn dedupe_consecutive_lines(text: &str) -> String {
    let mut out: Vec<&str> = Vec::new();
    let mut last_nonblank: Option<&str> = None;
    let mut pending_blank = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            pending_blank = true;
            continue;
        }
        if last_nonblank == Some(line) {
            continue;
        }
        if pending_blank && !out.is_empty() {
            out.push("");
        }
        pending_blank = false;
        out.push(line);
        last_nonblank = Some(line);
    }
    out.join("\n")
}

/// The mechanical half of refinement. Markdown: consecutive-duplicate
/// removal, blank-line normalization, and the document whitespace
/// invariants. Json: strict parse and canonical (sorted-key, compact)
/// reserialization; a parse failure is permanent.
fn mechanical_normalize(task: Task, text: &str) -> Result<String, String> {
    match task {
        Task::Markdown => Ok(normalize_markdown(&dedupe_consecutive_lines(text))),
        Task::Json => {
            let value: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| format!("refinement unparseable: {e}"))?;
            Ok(serde_json::to_string(&value).expect("reserializing a parsed value"))
        }
    }
}

/// Strict verdict protocol: the first line must be exactly `PASS` or `FAIL`
/// (trailing whitespace ignored); the rest is the explanation.
fn parse_critique(output: &str) -> Option<(bool, String)> {
    let (first, rest) = output.split_once('\n').unwrap_or((output, ""));
    let verdict = match first.trim_end() {
        "PASS" => true,
        "FAIL" => false,
        _ => return None,
    };
    Some((verdict, rest.trim().to_string()))
}

fn stage_counts<T>(rows: &[StageRow<T>]) -> StageCounts {
    StageCounts {
        ok: rows.iter().filter(|r| r.status == StageStatus::Ok).count() as u64,
        skip: rows.iter().filter(|r| r.status == StageStatus::Skip).count() as u64,
        retries: rows.iter().map(|r| r.retries as u64).sum(),
    }
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text).map_err(|e| io_err(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn wrap_rows<T: Clone>(
    examples: Vec<T>,
    round: u32,
    backend_name: &str,
    created_at: &str,
) -> Vec<DatasetRow<T>> {
    examples
        .into_iter()
        .map(|example| DatasetRow {
            example,
            pipeline_round: round,
            backend_name: backend_name.to_string(),
            created_at: created_at.to_string(),
        })
        .collect()
}

/// Runs draft → refine → critique over `corpus` and assembles the three
/// datasets under `out_dir/round-{round}/`.
///
/// Per-document failures become skip rows (after retries) and never abort the
/// run; sustained failure does, as
/// [`BackendUnavailable`](PipelineError::BackendUnavailable). With
/// `cfg.resume` the run continues from the existing stage logs after
/// verifying the corpus hash and seed; without it any previous round
/// directory is replaced. When every backend is deterministic, rerunning
/// (or interrupting and resuming) produces byte-identical artifacts.
pub fn run_pipeline(
    corpus: &[CorpusDoc],
    cfg: &PipelineConfig,
    backends: &StageBackends,
) -> Result<RunSummary, PipelineError> {
    cfg.templates.validate()?;
    if cfg.task == Task::Json && cfg.schema_json.is_none() {
        return Err(PipelineError::TemplateError(
            "the json task requires a schema (set schema_json)".to_string(),
        ));
    }

    let hash = corpus_hash(corpus);
    let deterministic = backends.deterministic();
    let round_dir = cfg.out_dir.join(format!("round-{}", cfg.round));
    let header_path = round_dir.join("run.json");

    let started_at = if cfg.resume && header_path.exists() {
        let text = std::fs::read_to_string(&header_path).map_err(|e| io_err(&header_path, e))?;
        let header: RunHeader = serde_json::from_str(&text).map_err(|e| {
            PipelineError::ResumeMismatch(format!("unreadable run header: {e}"))
        })?;
        if header.corpus_hash != hash {
            return Err(PipelineError::ResumeMismatch(
                "corpus hash differs from the interrupted run".to_string(),
            ));
        }
        if header.seed != cfg.seed {
            return Err(PipelineError::ResumeMismatch(
                "seed differs from the interrupted run".to_string(),
            ));
        }
        if header.task != cfg.task {
            return Err(PipelineError::ResumeMismatch(
                "task differs from the interrupted run".to_string(),
            ));
        }
        header.started_at
    } else {
        if !cfg.resume && round_dir.exists() {
            std::fs::remove_dir_all(&round_dir).map_err(|e| io_err(&round_dir, e))?;
        }
        std::fs::create_dir_all(&round_dir).map_err(|e| io_err(&round_dir, e))?;
        let started_at = if deterministic { EPOCH.to_string() } else { now_rfc3339() };
        let header = RunHeader {
            round: cfg.round,
            task: cfg.task,
            seed: cfg.seed,
            corpus_hash: hash.clone(),
            started_at: started_at.clone(),
        };
        write_json_atomic(&header_path, &header)?;
        started_at
    };

    let mut params = cfg.gen_params.clone();
    if params.seed.is_none() {
        params.seed = Some(cfg.seed);
    }
    let schema = cfg.schema_json.as_deref().unwrap_or("");
    let doc_by_id: BTreeMap<&str, &CorpusDoc> =
        corpus.iter().map(|d| (d.doc_id.as_str(), d)).collect();

    // Stage 1: draft.
    let task = cfg.task;
    let timestamp = started_at.clone();
    let draft_rows: Vec<StageRow<DraftRecord>> = run_stage(
        "draft",
        &round_dir.join("stage_draft.jsonl"),
        corpus,
        cfg.resume,
        cfg.jobs,
        &cfg.retry,
        |doc: &CorpusDoc| {
            let (system, user) =
                cfg.templates.draft.render(&[("html", doc.html.as_str()), ("schema", schema)]);
            let output = backends
                .draft
                .generate(&system, &user, &params)
                .map_err(|e| StageFailure::Transient(e.message))?;
            if output.trim().is_empty() {
                return Err(StageFailure::Transient("backend returned empty output".to_string()));
            }
            Ok(DraftRecord {
                doc_id: doc.doc_id.clone(),
                instruction: instruction_of(&user),
                task,
                draft_output: output,
                backend_name: backends.draft.name().to_string(),
                timestamp: timestamp.clone(),
            })
        },
    )?;

    // Stage 2: refine.
    let drafts: Vec<DraftRecord> = draft_rows.iter().filter_map(|r| r.record.clone()).collect();
    let refine_rows: Vec<StageRow<RefineRecord>> = run_stage(
        "refine",
        &round_dir.join("stage_refine.jsonl"),
        &drafts,
        cfg.resume,
        cfg.jobs,
        &cfg.retry,
        |draft: &DraftRecord| {
            let doc = doc_by_id
                .get(draft.doc_id.as_str())
                .ok_or_else(|| StageFailure::Permanent("doc_id not in corpus".to_string()))?;
            let normalized =
                mechanical_normalize(task, &draft.draft_output).map_err(StageFailure::Permanent)?;
            let (system, user) = cfg.templates.refine.render(&[
                ("html", doc.html.as_str()),
                ("draft", normalized.as_str()),
                ("schema", schema),
            ]);
            let output = backends
                .refine
                .generate(&system, &user, &params)
                .map_err(|e| StageFailure::Transient(e.message))?;
            if output.trim().is_empty() {
                return Err(StageFailure::Transient("backend returned empty output".to_string()));
            }
            let refined = mechanical_normalize(task, &output).map_err(StageFailure::Permanent)?;
            if refined.trim().is_empty() {
                return Err(StageFailure::Permanent("refined output is empty".to_string()));
            }
            Ok(RefineRecord {
                doc_id: draft.doc_id.clone(),
                changed: refined != draft.draft_output,
                refined_output: refined,
            })
        },
    )?;

    // Stage 3: critique.
    let refines: Vec<RefineRecord> = refine_rows.iter().filter_map(|r| r.record.clone()).collect();
    let draft_by_id: BTreeMap<&str, &DraftRecord> =
        drafts.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let critique_rows: Vec<StageRow<CritiqueRecord>> = run_stage(
        "critique",
        &round_dir.join("stage_critique.jsonl"),
        &refines,
        cfg.resume,
        cfg.jobs,
        &cfg.retry,
        |refine: &RefineRecord| {
            let draft = draft_by_id
                .get(refine.doc_id.as_str())
                .ok_or_else(|| StageFailure::Permanent("doc_id not in drafts".to_string()))?;
            let doc = doc_by_id
                .get(refine.doc_id.as_str())
                .ok_or_else(|| StageFailure::Permanent("doc_id not in corpus".to_string()))?;
            let (system, user) = cfg.templates.critique.render(&[
                ("instruction", draft.instruction.as_str()),
                ("html", doc.html.as_str()),
                ("refined", refine.refined_output.as_str()),
            ]);
            let output = backends
                .critique
                .generate(&system, &user, &params)
                .map_err(|e| StageFailure::Transient(e.message))?;
            let parsed = match parse_critique(&output) {
                Some(v) => Some(v),
                None => {
                    // Unparseable verdict: re-ask once before giving up.
                    let second = backends
                        .critique
                        .generate(&system, &user, &params)
                        .map_err(|e| StageFailure::Transient(e.message))?;
                    parse_critique(&second)
                }
            };
            let (verdict, explanation) =
                parsed.unwrap_or((false, "unparseable critique".to_string()));
            let explanation = if explanation.is_empty() {
                "no explanation provided".to_string()
            } else {
                explanation
            };
            Ok(CritiqueRecord { doc_id: refine.doc_id.clone(), verdict, explanation })
        },
    )?;

    // The join: a document appears only if every stage produced a record.
    let critiques: Vec<CritiqueRecord> =
        critique_rows.iter().filter_map(|r| r.record.clone()).collect();
    let refine_by_id: BTreeMap<&str, &RefineRecord> =
        refines.iter().map(|r| (r.doc_id.as_str(), r)).collect();
    let critique_by_id: BTreeMap<&str, &CritiqueRecord> =
        critiques.iter().map(|c| (c.doc_id.as_str(), c)).collect();
    let joined: Vec<JoinedRecord> = corpus
        .iter()
        .filter_map(|doc| {
            Some(JoinedRecord {
                doc,
                draft: draft_by_id.get(doc.doc_id.as_str())?,
                refine: refine_by_id.get(doc.doc_id.as_str())?,
                critique: critique_by_id.get(doc.doc_id.as_str())?,
            })
        })
        .collect();

    let (sft, mut warnings) = assemble_sft_filtered(&joined);
    let (critique_ds, more) = assemble_critique_dataset(&joined, cfg.seed);
    warnings.extend(more);
    let dpo = assemble_dpo(&joined);

    let dataset_counts: BTreeMap<String, u64> = [
        ("sft_filtered".to_string(), sft.len() as u64),
        ("sft_critique".to_string(), critique_ds.len() as u64),
        ("dpo_preference".to_string(), dpo.len() as u64),
    ]
    .into_iter()
    .collect();

    crate::jsonl::write_jsonl_atomic(
        &round_dir.join("sft_filtered.jsonl"),
        &wrap_rows(sft, cfg.round, backends.draft.name(), &started_at),
    )?;
    crate::jsonl::write_jsonl_atomic(
        &round_dir.join("sft_critique.jsonl"),
        &wrap_rows(critique_ds, cfg.round, backends.critique.name(), &started_at),
    )?;
    crate::jsonl::write_jsonl_atomic(
        &round_dir.join("dpo_preference.jsonl"),
        &wrap_rows(dpo, cfg.round, backends.draft.name(), &started_at),
    )?;

    let stage_count_map: BTreeMap<String, StageCounts> = [
        ("draft".to_string(), stage_counts(&draft_rows)),
        ("refine".to_string(), stage_counts(&refine_rows)),
        ("critique".to_string(), stage_counts(&critique_rows)),
    ]
    .into_iter()
    .collect();
    let skipped: u64 = stage_count_map.values().map(|c| c.skip).sum();
    if corpus.is_empty() {
        warnings.push("empty corpus: all datasets are empty".to_string());
    }
    if skipped > 0 {
        warnings.push(format!("{skipped} documents were skipped across stages"));
    }

    let manifest = RunManifest {
        round: cfg.round,
        task: cfg.task,
        corpus_hash: hash,
        doc_count: corpus.len() as u64,
        seed: cfg.seed,
        backends: [
            ("draft".to_string(), backends.draft.name().to_string()),
            ("refine".to_string(), backends.refine.name().to_string()),
            ("critique".to_string(), backends.critique.name().to_string()),
        ]
        .into_iter()
        .collect(),
        deterministic,
        template_hashes: [
            ("draft".to_string(), cfg.templates.draft.hash()),
            ("refine".to_string(), cfg.templates.refine.hash()),
            ("critique".to_string(), cfg.templates.critique.hash()),
        ]
        .into_iter()
        .collect(),
        gen_params: params,
        finished_at: if deterministic { started_at.clone() } else { now_rfc3339() },
        started_at,
        stage_counts: stage_count_map,
        dataset_counts,
        warnings,
    };
    write_json_atomic(&round_dir.join("manifest.json"), &manifest)?;

    Ok(RunSummary { manifest, round_dir, skipped })
}

/// Stage 4: rerun the pipeline with `new_draft` as the draft backend under
/// the next round number. Refine and critique backends are unchanged.
pub fn self_play_round(
    corpus: &[CorpusDoc],
    cfg: &PipelineConfig,
    backends: &StageBackends,
    new_draft: &dyn GenerationBackend,
) -> Result<RunSummary, PipelineError> {
    let mut next = cfg.clone();
    next.round = cfg.round + 1;
    let swapped = StageBackends {
        draft: new_draft,
        refine: backends.refine,
        critique: backends.critique,
    };
    run_pipeline(corpus, &next, &swapped)
}
