//! Append-only stage logs.
//!
//! Each pipeline stage writes one JSONL row per input document as soon as the
//! document finishes, flushing after every row. A killed run can therefore
//! leave at most one partial final line, which [`load_stage_log`] detects and
//! truncates away; anything malformed *before* the final line means real
//! corruption and is a hard error. The number of valid rows is exactly the
//! resume offset.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{io_err, PipelineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    /// The document produced a record.
    Ok,
    /// The document was given up on (retries exhausted or a permanent
    /// per-document failure); excluded from all downstream stages.
    Skip,
}

/// One log row: the outcome for input number `seq` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRow<T> {
    pub seq: u64,
    pub status: StageStatus,
    #[serde(default = "none_of", skip_serializing_if = "Option::is_none")]
    pub record: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub retries: u32,
}

fn none_of<T>() -> Option<T> {
    None
}

/// Loads a stage log, truncating a partial final line in place (the
/// signature of a killed run). Returns the valid rows in order.
///
/// A missing file is an empty log. A malformed line anywhere except the
/// unterminated tail, or a row whose `seq` does not match its position, is
/// [`PipelineError::LogCorrupted`].
pub fn load_stage_log<T: DeserializeOwned>(path: &Path) -> Result<Vec<StageRow<T>>, PipelineError> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    let mut rows: Vec<StageRow<T>> = Vec::new();
    let mut pos = 0usize;
    while pos < bytes.len() {
        match bytes[pos..].iter().position(|&b| b == b'\n') {
            Some(rel) => {
                let line = &bytes[pos..pos + rel];
                let row: StageRow<T> =
                    serde_json::from_slice(line).map_err(|e| PipelineError::LogCorrupted {
                        path: path.display().to_string(),
                        line: rows.len() + 1,
                        message: e.to_string(),
                    })?;
                if row.seq != rows.len() as u64 {
                    return Err(PipelineError::LogCorrupted {
                        path: path.display().to_string(),
                        line: rows.len() + 1,
                        message: format!("expected seq {}, found {}", rows.len(), row.seq),
                    });
                }
                rows.push(row);
                pos += rel + 1;
            }
            None => {
                // Unterminated tail: a write was interrupted. Drop it so the
                // next append continues from a clean prefix.
                let file = std::fs::OpenOptions::new()
                    .write(true)
                    .open(path)
                    .map_err(|e| io_err(path, e))?;
                file.set_len(pos as u64).map_err(|e| io_err(path, e))?;
                break;
            }
        }
    }
    Ok(rows)
}

/// Serialized single-writer append handle for a stage log.
pub(crate) struct StageLogWriter {
    file: std::fs::File,
    path: std::path::PathBuf,
}

impl StageLogWriter {
    pub(crate) fn open(path: &Path) -> Result<StageLogWriter, PipelineError> {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(StageLogWriter { file, path: path.to_path_buf() })
    }

    pub(crate) fn append<T: Serialize>(&mut self, row: &StageRow<T>) -> Result<(), PipelineError> {
        let mut line = serde_json::to_string(row).map_err(|e| PipelineError::LogCorrupted {
            path: self.path.display().to_string(),
            line: 0,
            message: format!("unserializable row: {e}"),
        })?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|e| io_err(&self.path, e))
    }
}
