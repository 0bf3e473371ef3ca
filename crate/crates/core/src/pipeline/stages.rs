//! The generic stage runner: ordered, chunked, parallel execution with
//! per-document retries, skip records, resumability, and a
//! consecutive-failure circuit breaker.

use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::log::{load_stage_log, StageLogWriter, StageRow, StageStatus};
use super::PipelineError;

/// How per-document failures are retried and when a stage gives up entirely.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    /// Retries after the first attempt (so `3` means up to 4 attempts).
    pub max_retries: u32,
    /// Sleep before retry `i`; the last entry repeats if retries exceed it.
    pub backoff: Vec<Duration>,
    /// Abort the stage as `BackendUnavailable` once this many documents in a
    /// row have been skipped.
    pub max_consecutive_failures: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            backoff: vec![
                Duration::from_secs(1),
                Duration::from_secs(4),
                Duration::from_secs(16),
            ],
            max_consecutive_failures: 5,
        }
    }
}

impl RetryPolicy {
    /// A policy for tests: immediate retries, tight abort threshold.
    pub fn immediate(max_retries: u32, max_consecutive_failures: u32) -> RetryPolicy {
        RetryPolicy { max_retries, backoff: Vec::new(), max_consecutive_failures }
    }
}

/// How one attempt at one document failed.
pub(crate) enum StageFailure {
    /// Worth retrying (backend hiccup, empty output).
    Transient(String),
    /// Retrying cannot help (e.g. a draft that does not parse); the document
    /// is skipped immediately.
    Permanent(String),
}

fn attempt_with_retries<I, T>(
    item: &I,
    policy: &RetryPolicy,
    f: &(impl Fn(&I) -> Result<T, StageFailure> + Sync),
) -> (Result<T, String>, u32) {
    let mut retries = 0u32;
    loop {
        match f(item) {
            Ok(t) => return (Ok(t), retries),
            Err(StageFailure::Permanent(msg)) => return (Err(msg), retries),
            Err(StageFailure::Transient(msg)) => {
                if retries >= policy.max_retries {
                    return (Err(msg), retries);
                }
                let delay = policy
                    .backoff
                    .get(retries as usize)
                    .or(policy.backoff.last())
                    .copied()
                    .unwrap_or(Duration::ZERO);
                std::thread::sleep(delay);
                retries += 1;
            }
        }
    }
}

/// Runs one stage over `inputs`, appending a row per input to `log_path` in
/// input order. With `resume`, previously logged rows are kept and execution
/// continues from the first unlogged input; otherwise any existing log is
/// replaced. Documents run in parallel within chunks of `jobs * 8`, but rows
/// are committed strictly in input order, so the log (and everything
/// downstream) is deterministic for deterministic closures.
pub(crate) fn run_stage<I, T, F>(
    stage_name: &str,
    log_path: &Path,
    inputs: &[I],
    resume: bool,
    jobs: usize,
    policy: &RetryPolicy,
    f: F,
) -> Result<Vec<StageRow<T>>, PipelineError>
where
    I: Sync,
    T: Serialize + DeserializeOwned + Clone + Send,
    F: Fn(&I) -> Result<T, StageFailure> + Sync,
{
    let mut rows: Vec<StageRow<T>> = if resume {
        load_stage_log(log_path)?
    } else {
        match std::fs::remove_file(log_path) {
            Ok(()) => Vec::new(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(super::io_err(log_path, e)),
        }
    };
    if rows.len() > inputs.len() {
        return Err(PipelineError::ResumeMismatch(format!(
            "{stage_name} log has {} rows but the stage has only {} inputs",
            rows.len(),
            inputs.len()
        )));
    }

    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::ResumeMismatch(format!("thread pool: {e}")))?;

    let mut writer = StageLogWriter::open(log_path)?;
    let mut consecutive = rows
        .iter()
        .rev()
        .take_while(|r| r.status == StageStatus::Skip)
        .count() as u32;

    let start = rows.len();
    for chunk in inputs[start..].chunks(jobs * 8) {
        let results: Vec<(Result<T, String>, u32)> =
            pool.install(|| chunk.par_iter().map(|i| attempt_with_retries(i, policy, &f)).collect());
        for (result, retries) in results {
            let seq = rows.len() as u64;
            let row = match result {
                Ok(record) => StageRow {
                    seq,
                    status: StageStatus::Ok,
                    record: Some(record),
                    error: None,
                    retries,
                },
                Err(message) => StageRow {
                    seq,
                    status: StageStatus::Skip,
                    record: None,
                    error: Some(message),
                    retries,
                },
            };
            writer.append(&row)?;
            let skipped = row.status == StageStatus::Skip;
            let last_error = row.error.clone();
            rows.push(row);
            if skipped {
                consecutive += 1;
                if consecutive >= policy.max_consecutive_failures {
                    return Err(PipelineError::BackendUnavailable {
                        stage: stage_name.to_string(),
                        consecutive,
                        last_error: last_error.unwrap_or_default(),
                    });
                }
            } else {
                consecutive = 0;
            }
        }
    }
    Ok(rows)
}
