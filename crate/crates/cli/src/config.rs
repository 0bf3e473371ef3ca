//! Layered run configuration.
//!
//! Effective settings are built in four layers, each overriding the previous:
//! built-in defaults, a TOML config file (`--config` or `HTMLSIFT_CONFIG`),
//! `HTMLSIFT_<SECTION>_<KEY>` environment variables, and command-line flags.
//! `--print-config` emits the effective configuration as TOML; feeding that
//! file back via `--config` reproduces the run.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use htmlsift_core::pipeline::Task;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub global: GlobalSection,
    pub backend: BackendSection,
    pub synth: SynthSection,
    pub corpus: CorpusSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlobalSection {
    /// Seed for every random decision in a run.
    pub seed: u64,
    /// Worker threads; defaults to the number of logical cores.
    pub jobs: usize,
    /// "markdown" or "json".
    pub task: String,
    /// Continue an interrupted run from its stage logs.
    pub resume: bool,
    /// Log filter (error|warn|info|debug|trace); RUST_LOG overrides it.
    pub log_level: String,
}

impl Default for GlobalSection {
    fn default() -> Self {
        GlobalSection {
            seed: 0,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4),
            task: "markdown".to_string(),
            resume: false,
            log_level: "warn".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackendSection {
    /// "mock" (offline, deterministic) or "http" (remote chat-completion).
    pub kind: String,
    /// Behavior variant for the mock backend; different variants act like
    /// different models.
    pub mock_variant: u64,
    /// Artificial per-call latency for the mock backend, in milliseconds.
    pub mock_delay_ms: u64,
    /// Chat-completion endpoint URL (http kind).
    pub url: String,
    /// Model identifier sent to the endpoint (http kind).
    pub model: String,
    /// Name of the environment variable holding the bearer token (http kind).
    pub token_env: String,
    /// Per-request timeout (http kind).
    pub timeout_secs: u64,
}

impl Default for BackendSection {
    fn default() -> Self {
        BackendSection {
            kind: "mock".to_string(),
            mock_variant: 0,
            mock_delay_ms: 0,
            url: String::new(),
            model: String::new(),
            token_env: "HTMLSIFT_API_TOKEN".to_string(),
            timeout_secs: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    /// Pipeline round number; artifacts land in `out_dir/round-{round}/`.
    pub round: u32,
    pub max_output_tokens: u32,
    pub temperature: f64,
    /// Retries per document after the first attempt.
    pub max_retries: u32,
    /// Sleep before retry i; the last entry repeats for later retries.
    pub backoff_secs: Vec<u64>,
    /// Abort the run after this many consecutively skipped documents.
    pub max_consecutive_failures: u32,
    /// Directory with draft.txt / refine.txt / critique.txt prompt template
    /// overrides; empty means the built-in templates.
    pub template_dir: String,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection {
            round: 1,
            max_output_tokens: 4096,
            temperature: 0.0,
            max_retries: 3,
            backoff_secs: vec![1, 4, 16],
            max_consecutive_failures: 5,
            template_dir: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    /// Curriculum length budget in tokens.
    pub max_len: u64,
    /// Target fraction of long documents in the curriculum.
    pub long_fraction: f64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection { max_len: 4096, long_fraction: 0.4 }
    }
}

impl Config {
    /// Defaults overridden by a TOML file: with serde defaults in place,
    /// deserializing the file yields exactly "defaults plus file".
    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// Applies `HTMLSIFT_<SECTION>_<KEY>` environment overrides.
    pub fn apply_env(&mut self) -> Result<()> {
        set_from_env("HTMLSIFT_GLOBAL_SEED", &mut self.global.seed)?;
        set_from_env("HTMLSIFT_GLOBAL_JOBS", &mut self.global.jobs)?;
        set_string_from_env("HTMLSIFT_GLOBAL_TASK", &mut self.global.task);
        set_from_env("HTMLSIFT_GLOBAL_RESUME", &mut self.global.resume)?;
        set_string_from_env("HTMLSIFT_GLOBAL_LOG_LEVEL", &mut self.global.log_level);
        set_string_from_env("HTMLSIFT_BACKEND_KIND", &mut self.backend.kind);
        set_from_env("HTMLSIFT_BACKEND_MOCK_VARIANT", &mut self.backend.mock_variant)?;
        set_from_env("HTMLSIFT_BACKEND_MOCK_DELAY_MS", &mut self.backend.mock_delay_ms)?;
        set_string_from_env("HTMLSIFT_BACKEND_URL", &mut self.backend.url);
        set_string_from_env("HTMLSIFT_BACKEND_MODEL", &mut self.backend.model);
        set_string_from_env("HTMLSIFT_BACKEND_TOKEN_ENV", &mut self.backend.token_env);
        set_from_env("HTMLSIFT_BACKEND_TIMEOUT_SECS", &mut self.backend.timeout_secs)?;
        set_from_env("HTMLSIFT_SYNTH_ROUND", &mut self.synth.round)?;
        set_from_env("HTMLSIFT_SYNTH_MAX_OUTPUT_TOKENS", &mut self.synth.max_output_tokens)?;
        set_from_env("HTMLSIFT_SYNTH_TEMPERATURE", &mut self.synth.temperature)?;
        set_from_env("HTMLSIFT_SYNTH_MAX_RETRIES", &mut self.synth.max_retries)?;
        if let Some(raw) = env_var("HTMLSIFT_SYNTH_BACKOFF_SECS") {
            self.synth.backoff_secs = raw
                .split(',')
                .map(|part| {
                    part.trim().parse::<u64>().map_err(|e| {
                        anyhow!("HTMLSIFT_SYNTH_BACKOFF_SECS: bad entry {part:?}: {e}")
                    })
                })
                .collect::<Result<Vec<u64>>>()?;
        }
        set_from_env(
            "HTMLSIFT_SYNTH_MAX_CONSECUTIVE_FAILURES",
            &mut self.synth.max_consecutive_failures,
        )?;
        set_string_from_env("HTMLSIFT_SYNTH_TEMPLATE_DIR", &mut self.synth.template_dir);
        set_from_env("HTMLSIFT_CORPUS_MAX_LEN", &mut self.corpus.max_len)?;
        set_from_env("HTMLSIFT_CORPUS_LONG_FRACTION", &mut self.corpus.long_fraction)?;
        Ok(())
    }

    /// Invariants that hold regardless of subcommand.
    pub fn validate(&self) -> Result<()> {
        self.task()?;
        match self.backend.kind.as_str() {
            "mock" | "http" => {}
            other => bail!("backend.kind must be \"mock\" or \"http\", got {other:?}"),
        }
        if self.global.jobs == 0 {
            bail!("global.jobs must be at least 1");
        }
        if !(0.0..1.0).contains(&self.corpus.long_fraction) {
            bail!(
                "corpus.long_fraction must be in [0, 1), got {}",
                self.corpus.long_fraction
            );
        }
        if self.corpus.max_len == 0 {
            bail!("corpus.max_len must be positive");
        }
        if !self.synth.temperature.is_finite() || self.synth.temperature < 0.0 {
            bail!("synth.temperature must be a non-negative number");
        }
        Ok(())
    }

    pub fn task(&self) -> Result<Task> {
        match self.global.task.as_str() {
            "markdown" => Ok(Task::Markdown),
            "json" => Ok(Task::Json),
            other => Err(anyhow!("global.task must be \"markdown\" or \"json\", got {other:?}")),
        }
    }

    /// The effective configuration as a TOML document.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }
}

fn env_var(name: &str) -> Option<String> {
    match std::env::var(name) {
        Ok(v) => Some(v),
        Err(_) => None,
    }
}

fn set_from_env<T: std::str::FromStr>(name: &str, slot: &mut T) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(raw) = env_var(name) {
        *slot = raw.parse().map_err(|e| anyhow!("{name}: cannot parse {raw:?}: {e}"))?;
    }
    Ok(())
}

fn set_string_from_env(name: &str, slot: &mut String) {
    if let Some(raw) = env_var(name) {
        *slot = raw;
    }
}
