//! JSONL file helpers shared by the corpus store, stage logs, and datasets.

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid record: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> JsonlError {
    JsonlError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes all rows to a temporary sibling file, then renames it into place,
/// so readers never observe a half-written dataset.
pub fn write_jsonl_atomic<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), JsonlError> {
    let tmp = path.with_extension("tmp");
    {
        let file = File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        let mut out = BufWriter::new(file);
        for row in rows {
            let line = serde_json::to_string(row).map_err(|e| JsonlError::Record {
                path: path.to_path_buf(),
                line: 0,
                message: e.to_string(),
            })?;
            out.write_all(line.as_bytes()).map_err(|e| io_err(&tmp, e))?;
            out.write_all(b"\n").map_err(|e| io_err(&tmp, e))?;
        }
        let file = out.into_inner().map_err(|e| io_err(&tmp, e.into()))?;
        file.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads a whole JSONL file strictly: any malformed non-empty line is an
/// error. Blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| JsonlError::Record {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a JSONL file leniently: malformed lines become warning strings
/// instead of errors. I/O failures still fail.
pub fn read_jsonl_lenient<T: DeserializeOwned>(
    path: &Path,
) -> Result<(Vec<T>, Vec<String>), JsonlError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(row) => rows.push(row),
            Err(e) => warnings.push(format!("{}:{}: skipped malformed row: {e}", path.display(), i + 1)),
        }
    }
    Ok((rows, warnings))
}

/// Append-mode JSONL writer that flushes after every record, so each written
/// record survives an abrupt kill (at worst the final line is partial).
pub struct JsonlAppender {
    path: PathBuf,
    out: BufWriter<File>,
}

impl JsonlAppender {
    pub fn open(path: &Path) -> Result<JsonlAppender, JsonlError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(JsonlAppender {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn append<T: Serialize>(&mut self, row: &T) -> Result<(), JsonlError> {
        let line = serde_json::to_string(row).map_err(|e| JsonlError::Record {
            path: self.path.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .and_then(|_| self.out.flush())
            .map_err(|e| io_err(&self.path, e))
    }
}
