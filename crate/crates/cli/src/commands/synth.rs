//! `htmlsift synth` — drive the draft-refine-critique pipeline over a corpus
//! and emit the three training datasets plus a run manifest.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use htmlsift_core::corpus::{ingest_dir, read_corpus, CorpusDoc};
use htmlsift_core::pipeline::{
    run_pipeline, GenerationBackend, HttpBackend, HttpBackendConfig, MockBackend, PipelineConfig,
    PromptTemplate, RetryPolicy, Stage, StageBackends, StageTemplates, Task,
};

use crate::config::Config;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Corpus: a .jsonl corpus store, or a directory of HTML files to ingest
    /// on the fly.
    #[arg(long, required = true, value_name = "PATH")]
    pub corpus: PathBuf,

    /// Output directory; artifacts land in <DIR>/round-<N>/.
    #[arg(long, required = true, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// JSON schema file (required for the json task).
    #[arg(long, value_name = "FILE")]
    pub schema: Option<PathBuf>,
}

pub fn run(args: &SynthArgs, cfg: &Config) -> Result<i32> {
    let task = cfg.task()?;
    let corpus = load_corpus(&args.corpus)?;

    let schema_json = match (&task, &args.schema) {
        (Task::Json, Some(path)) => Some(
            std::fs::read_to_string(path)
                .with_context(|| format!("cannot read schema {}", path.display()))?,
        ),
        (Task::Json, None) => bail!("--schema is required for the json task"),
        (Task::Markdown, _) => None,
    };

    // Backend construction fails fast — before the corpus is touched again
    // and before any network traffic — when required auth is missing.
    let backend = build_backend(cfg)?;

    let mut pipeline_cfg = PipelineConfig::new(task, &args.out_dir);
    pipeline_cfg.round = cfg.synth.round;
    pipeline_cfg.seed = cfg.global.seed;
    pipeline_cfg.jobs = cfg.global.jobs;
    pipeline_cfg.resume = cfg.global.resume;
    pipeline_cfg.schema_json = schema_json;
    pipeline_cfg.gen_params.max_output_tokens = cfg.synth.max_output_tokens;
    pipeline_cfg.gen_params.temperature = cfg.synth.temperature;
    pipeline_cfg.retry = RetryPolicy {
        max_retries: cfg.synth.max_retries,
        backoff: cfg.synth.backoff_secs.iter().map(|&s| Duration::from_secs(s)).collect(),
        max_consecutive_failures: cfg.synth.max_consecutive_failures,
    };
    pipeline_cfg.templates = load_templates(task, &cfg.synth.template_dir)?;

    let summary = run_pipeline(&corpus, &pipeline_cfg, &StageBackends::uniform(backend.as_ref()))?;

    for warning in &summary.manifest.warnings {
        log::warn!("{warning}");
    }
    println!("round {} complete: {}", summary.manifest.round, summary.round_dir.display());
    println!("documents: {}", summary.manifest.doc_count);
    for (name, count) in &summary.manifest.dataset_counts {
        println!("{name}: {count} records");
    }
    if summary.skipped > 0 {
        println!("skipped: {} documents", summary.skipped);
        return Ok(2);
    }
    Ok(0)
}

fn load_corpus(path: &Path) -> Result<Vec<CorpusDoc>> {
    if path.is_dir() {
        let report = ingest_dir(path)
            .with_context(|| format!("cannot ingest corpus directory {}", path.display()))?;
        for warning in &report.warnings {
            log::warn!("{warning}");
        }
        Ok(report.docs)
    } else {
        read_corpus(path).with_context(|| format!("cannot read corpus store {}", path.display()))
    }
}

pub fn build_backend(cfg: &Config) -> Result<Box<dyn GenerationBackend>> {
    match cfg.backend.kind.as_str() {
        "mock" => {
            let mut mock = if cfg.backend.mock_variant == 0 {
                MockBackend::new()
            } else {
                MockBackend::with_variant(cfg.backend.mock_variant)
            };
            if cfg.backend.mock_delay_ms > 0 {
                mock = mock.with_delay(Duration::from_millis(cfg.backend.mock_delay_ms));
            }
            Ok(Box::new(mock))
        }
        "http" => {
            if cfg.backend.url.is_empty() {
                bail!("backend.url must be set for the http backend");
            }
            if cfg.backend.model.is_empty() {
                bail!("backend.model must be set for the http backend");
            }
            let http = HttpBackend::new(HttpBackendConfig {
                url: cfg.backend.url.clone(),
                model: cfg.backend.model.clone(),
                token_env: cfg.backend.token_env.clone(),
                timeout: Duration::from_secs(cfg.backend.timeout_secs),
            })
            .context("cannot construct http backend")?;
            Ok(Box::new(http))
        }
        other => bail!("unknown backend kind {other:?}"),
    }
}

/// Built-in templates, overridden by draft.txt / refine.txt / critique.txt
/// files when `template_dir` names a directory containing them.
fn load_templates(task: Task, template_dir: &str) -> Result<StageTemplates> {
    let mut templates = StageTemplates::builtin(task);
    if !template_dir.is_empty() {
        let dir = Path::new(template_dir);
        if !dir.is_dir() {
            bail!("synth.template_dir {template_dir:?} is not a directory");
        }
        for (stage, slot) in [
            (Stage::Draft, &mut templates.draft),
            (Stage::Refine, &mut templates.refine),
            (Stage::Critique, &mut templates.critique),
        ] {
            let path = dir.join(format!("{stage}.txt"));
            if path.is_file() {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read template {}", path.display()))?;
                *slot = PromptTemplate::parse(&text)
                    .with_context(|| format!("invalid template {}", path.display()))?;
            }
        }
    }
    templates.validate().context("template validation failed")?;
    Ok(templates)
}
