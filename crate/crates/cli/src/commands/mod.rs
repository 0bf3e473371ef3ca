//! Subcommand implementations. Each `run` returns the process exit code:
//! 0 full success, 2 partial (some documents failed, the rest were written);
//! fatal problems are `Err` and exit 1.

pub mod convert;
pub mod corpus;
pub mod eval;
pub mod extract_json;
pub mod synth;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Expands the positional inputs: directories contribute every `.html`/`.htm`
/// file under them (recursively, in sorted order); plain paths pass through
/// verbatim so a missing file surfaces as a per-document failure, not a usage
/// error.
pub fn collect_html_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = walkdir::WalkDir::new(input)
                .sort_by_file_name()
                .into_iter()
                .filter_map(|entry| entry.ok())
                .filter(|entry| entry.file_type().is_file())
                .map(|entry| entry.into_path())
                .filter(|path| {
                    matches!(
                        path.extension().and_then(|e| e.to_str()),
                        Some(ext) if ext.eq_ignore_ascii_case("html") || ext.eq_ignore_ascii_case("htm")
                    )
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        bail!("no input files found");
    }
    Ok(files)
}

/// Maps each input to `out_dir/<stem>.<ext>`, rejecting stem collisions up
/// front so a partial run never silently overwrites one of its own outputs.
pub fn plan_outputs(files: &[PathBuf], out_dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut outputs = Vec::with_capacity(files.len());
    let mut seen: std::collections::BTreeMap<PathBuf, &PathBuf> = std::collections::BTreeMap::new();
    for file in files {
        let stem = file
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| !s.is_empty())
            .with_context(|| format!("cannot derive an output name from {}", file.display()))?;
        let out = out_dir.join(format!("{stem}.{ext}"));
        if let Some(previous) = seen.insert(out.clone(), file) {
            bail!(
                "inputs {} and {} both map to {}; rename one or convert them separately",
                previous.display(),
                file.display(),
                out.display()
            );
        }
        outputs.push(out);
    }
    Ok(outputs)
}

