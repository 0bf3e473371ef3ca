//! Corpus management: ingesting raw HTML, language annotation and filtering,
//! token-length statistics, and length-curriculum bucketing.
//!
//! Documents are identified by a stable content hash, so ingestion is
//! deterministic and deduplicating regardless of traversal order. Token
//! counts come from a pluggable [`TokenEstimator`]; the default estimates
//! `ceil(utf8_bytes / 4)`, which is adequate for the order-of-magnitude
//! length statistics this module serves.

mod language;

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::html::{decode_bytes, parse_str};

/// Texts whose visible content is shorter than this many characters are
/// labeled `"und"` and never kept by language filtering.
pub const MIN_LANG_TEXT_CHARS: usize = 40;

/// One document in a corpus store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDoc {
    /// Stable hash of the document content (first 16 hex digits of SHA-256).
    pub doc_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub html: String,
    /// ISO-639-1 code, or `"und"` when detection had too little signal.
    pub lang: String,
    pub token_count: u64,
}

/// Length-curriculum bucketing of a corpus (40/60 long/short by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumPlan {
    pub max_len: u64,
    /// Requested share of long documents among bucketed documents.
    pub long_fraction: f64,
    /// Share actually achieved; differs from `long_fraction` when the corpus
    /// cannot supply enough long documents.
    pub achieved_fraction: f64,
    /// doc_ids with `token_count` in `(0.9 * max_len, max_len]`, in corpus order.
    pub long_bucket: Vec<String>,
    /// doc_ids of the remaining documents with `token_count <= max_len`.
    pub short_bucket: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("source unreadable: {path}: {source}")]
    SourceUnreadable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("long_fraction must be strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
}

/// Pluggable token counter. The default [`ByteTokenEstimator`] is a byte
/// heuristic; an exact tokenizer can be dropped in through this trait.
pub trait TokenEstimator: Sync {
    fn count(&self, text: &str) -> u64;
}

/// Default estimator: `ceil(utf8_byte_length / 4)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ByteTokenEstimator;

impl TokenEstimator for ByteTokenEstimator {
    fn count(&self, text: &str) -> u64 {
        estimate_tokens(text)
    }
}

/// `ceil(utf8_byte_length / 4)`: `""` → 0, 8 ASCII chars → 2,
/// a 100-byte string → 25.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4)
}

/// Stable document id: first 16 hex digits of the SHA-256 of the HTML.
pub fn doc_id_for(html: &str) -> String {
    let digest = Sha256::digest(html.as_bytes());
    hex::encode(&digest[..8])
}

/// The language codes accepted by default (editable via configuration).
pub fn default_allowed_langs() -> Vec<String> {
    [
        "ar", "bg", "cs", "da", "de", "el", "en", "es", "fi", "fr", "he", "hi", "hu", "id", "it",
        "ja", "ko", "nl", "no", "pl", "pt", "ro", "ru", "sv", "th", "tr", "uk", "vi", "zh",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Detects the document language from the visible text of the parsed HTML.
///
/// Returns the language code (or `"und"`) and whether the document should be
/// kept given `allowed`. Visible text shorter than [`MIN_LANG_TEXT_CHARS`]
/// characters yields `("und", false)` unconditionally.
pub fn detect_language(html: &str, allowed: &BTreeSet<String>) -> (String, bool) {
    let lang = lang_of_html(html);
    let keep = allowed.contains(&lang);
    (lang, keep)
}

fn lang_of_html(html: &str) -> String {
    let text = parse_str(html).inner_text();
    if text.chars().count() < MIN_LANG_TEXT_CHARS {
        return "und".to_string();
    }
    language::classify_text(&text)
}

/// Outcome of an ingestion run.
#[derive(Debug, Default)]
pub struct IngestReport {
    /// Deduplicated documents in deterministic (sorted-source) order.
    pub docs: Vec<CorpusDoc>,
    /// One human-readable warning per skipped input.
    pub warnings: Vec<String>,
    /// Number of inputs dropped because an identical document was already seen.
    pub duplicates: usize,
}

fn build_doc(html: String, url: Option<String>, estimator: &dyn TokenEstimator) -> CorpusDoc {
    CorpusDoc {
        doc_id: doc_id_for(&html),
        url,
        lang: lang_of_html(&html),
        token_count: estimator.count(&html),
        html,
    }
}

fn dedup_in_order(
    docs: impl IntoIterator<Item = CorpusDoc>,
    report: &mut IngestReport,
) {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for doc in docs {
        if seen.insert(doc.doc_id.clone()) {
            report.docs.push(doc);
        } else {
            report.duplicates += 1;
        }
    }
}

/// Ingests every `.html`/`.htm` file under `dir` (recursively) with the
/// default token estimator.
pub fn ingest_dir(dir: &Path) -> Result<IngestReport, CorpusError> {
    ingest_dir_with(dir, &ByteTokenEstimator)
}

/// [`ingest_dir`] with a custom token estimator.
///
/// Files are processed in sorted path order, so the resulting document order
/// (and the deduplicated id set) is independent of filesystem traversal
/// order. Unreadable individual files are skipped with a warning; an
/// unreadable root is an error.
pub fn ingest_dir_with(
    dir: &Path,
    estimator: &dyn TokenEstimator,
) -> Result<IngestReport, CorpusError> {
    let mut paths: Vec<std::path::PathBuf> = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| CorpusError::SourceUnreadable {
            path: dir.display().to_string(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let is_html = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"));
        if is_html {
            paths.push(entry.into_path());
        }
    }
    paths.sort();

    let mut report = IngestReport::default();
    let results: Vec<Result<CorpusDoc, String>> = paths
        .par_iter()
        .map(|path| match std::fs::read(path) {
            Ok(bytes) => Ok(build_doc(decode_bytes(&bytes, None), None, estimator)),
            Err(e) => Err(format!("skipping {}: {e}", path.display())),
        })
        .collect();
    let mut docs = Vec::new();
    for r in results {
        match r {
            Ok(doc) => docs.push(doc),
            Err(w) => report.warnings.push(w),
        }
    }
    dedup_in_order(docs, &mut report);
    Ok(report)
}

#[derive(Deserialize)]
struct RawJsonlDoc {
    #[serde(default)]
    url: Option<String>,
    html: String,
}

/// Ingests a JSONL file of `{url?, html}` rows with the default estimator.
pub fn ingest_jsonl(path: &Path) -> Result<IngestReport, CorpusError> {
    ingest_jsonl_with(path, &ByteTokenEstimator)
}

/// [`ingest_jsonl`] with a custom token estimator. Malformed rows are skipped
/// with a counted warning.
pub fn ingest_jsonl_with(
    path: &Path,
    estimator: &dyn TokenEstimator,
) -> Result<IngestReport, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::SourceUnreadable {
        path: path.display().to_string(),
        source: e,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut report = IngestReport::default();
    let mut rows: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::SourceUnreadable {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push((i + 1, line));
    }
    let results: Vec<Result<CorpusDoc, String>> = rows
        .par_iter()
        .map(|(lineno, line)| match serde_json::from_str::<RawJsonlDoc>(line) {
            Ok(raw) => Ok(build_doc(raw.html, raw.url, estimator)),
            Err(e) => Err(format!("skipping line {lineno}: {e}")),
        })
        .collect();
    let mut docs = Vec::new();
    for r in results {
        match r {
            Ok(doc) => docs.push(doc),
            Err(w) => report.warnings.push(w),
        }
    }
    dedup_in_order(docs, &mut report);
    Ok(report)
}

/// Splits documents into those whose language is in `allowed` and the number
/// dropped.
pub fn filter_by_language(docs: Vec<CorpusDoc>, allowed: &BTreeSet<String>) -> (Vec<CorpusDoc>, usize) {
    let before = docs.len();
    let kept: Vec<CorpusDoc> = docs.into_iter().filter(|d| allowed.contains(&d.lang)).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// One bin of the token-length histogram. Counts documents with
/// `lo < token_count <= hi`, except the first bin, which also includes 0,
/// and the last, which is unbounded above (`hi` = `None`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub lo: u64,
    pub hi: Option<u64>,
    pub count: u64,
}

/// Summary statistics plus a log-scaled histogram with fixed power-of-two
/// bucket edges from 256 to 1,048,576.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub count: u64,
    pub mean: f64,
    /// Nearest-rank median of the token counts.
    pub median: u64,
    /// Nearest-rank 95th percentile.
    pub p95: u64,
    pub max: u64,
    pub histogram: Vec<HistogramBucket>,
}

const HISTOGRAM_MIN_EDGE: u32 = 8; // 2^8 = 256
const HISTOGRAM_MAX_EDGE: u32 = 20; // 2^20 = 1,048,576

/// Token-length statistics over a corpus. Errors on an empty corpus.
pub fn length_stats<'a>(
    docs: impl IntoIterator<Item = &'a CorpusDoc>,
) -> Result<LengthStats, CorpusError> {
    let mut values: Vec<u64> = docs.into_iter().map(|d| d.token_count).collect();
    if values.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    values.sort_unstable();
    let n = values.len();
    let sum: u128 = values.iter().map(|&v| v as u128).sum();
    let mean = sum as f64 / n as f64;
    let nearest_rank = |q: f64| -> u64 {
        let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
        values[rank - 1]
    };

    let mut histogram: Vec<HistogramBucket> = Vec::new();
    histogram.push(HistogramBucket { lo: 0, hi: Some(1 << HISTOGRAM_MIN_EDGE), count: 0 });
    for k in HISTOGRAM_MIN_EDGE..HISTOGRAM_MAX_EDGE {
        histogram.push(HistogramBucket { lo: 1 << k, hi: Some(1 << (k + 1)), count: 0 });
    }
    histogram.push(HistogramBucket { lo: 1 << HISTOGRAM_MAX_EDGE, hi: None, count: 0 });
    for &v in &values {
        let idx = histogram
            .iter()
            .position(|b| match b.hi {
                Some(hi) => v <= hi && (v > b.lo || b.lo == 0),
                None => true,
            })
            .expect("last bucket is unbounded");
        histogram[idx].count += 1;
    }

    Ok(LengthStats {
        count: n as u64,
        mean,
        median: nearest_rank(0.5),
        p95: nearest_rank(0.95),
        max: *values.last().expect("non-empty"),
        histogram,
    })
}

/// Plans a length curriculum: documents with `token_count` in
/// `(0.9 * max_len, max_len]` are long-eligible; every other document with
/// `token_count <= max_len` goes to the short bucket. Long documents are
/// seeded-sampled so longs make up `long_fraction` of the bucketed total;
/// when the corpus cannot supply enough, all eligible documents are taken and
/// the achieved fraction is reported with a warning. Documents longer than
/// `max_len` are excluded.
pub fn plan_curriculum(
    docs: &[CorpusDoc],
    max_len: u64,
    long_fraction: f64,
    seed: u64,
) -> Result<CurriculumPlan, CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if !(long_fraction > 0.0 && long_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(long_fraction));
    }
    let mut warnings = Vec::new();
    let mut long_eligible: Vec<usize> = Vec::new();
    let mut short: Vec<usize> = Vec::new();
    let mut overlong = 0usize;
    for (i, doc) in docs.iter().enumerate() {
        let tc = doc.token_count;
        if tc > max_len {
            overlong += 1;
        } else if (tc as u128) * 10 > (max_len as u128) * 9 {
            long_eligible.push(i);
        } else {
            short.push(i);
        }
    }
    if overlong > 0 {
        warnings.push(format!(
            "{overlong} documents exceed max_len {max_len} and were excluded"
        ));
    }

    let ids = |indices: &[usize]| -> Vec<String> {
        indices.iter().map(|&i| docs[i].doc_id.clone()).collect()
    };

    let (long_indices, achieved) = if short.is_empty() {
        if !long_eligible.is_empty() {
            warnings.push("no short documents available; taking all long-eligible documents".to_string());
            (long_eligible.clone(), 1.0)
        } else {
            warnings.push("no documents at or below max_len; both buckets are empty".to_string());
            (Vec::new(), 0.0)
        }
    } else {
        // long / (long + short) = f, with the whole short pool kept.
        let target =
            (long_fraction / (1.0 - long_fraction) * short.len() as f64).round() as usize;
        if target <= long_eligible.len() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut sampled: Vec<usize> =
                rand::seq::index::sample(&mut rng, long_eligible.len(), target)
                    .into_iter()
                    .map(|k| long_eligible[k])
                    .collect();
            sampled.sort_unstable();
            let achieved = target as f64 / (target + short.len()) as f64;
            (sampled, achieved)
        } else {
            let achieved = long_eligible.len() as f64 / (long_eligible.len() + short.len()) as f64;
            warnings.push(format!(
                "only {} long-eligible documents for a target of {target}; achieved long fraction {achieved:.4}",
                long_eligible.len()
            ));
            (long_eligible.clone(), achieved)
        }
    };

    Ok(CurriculumPlan {
        max_len,
        long_fraction,
        achieved_fraction: achieved,
        long_bucket: ids(&long_indices),
        short_bucket: ids(&short),
        warnings,
    })
}

/// Writes a corpus store as JSONL (atomically).
pub fn write_corpus(path: &Path, docs: &[CorpusDoc]) -> Result<(), crate::jsonl::JsonlError> {
    crate::jsonl::write_jsonl_atomic(path, docs)
}

/// Reads a corpus store written by [`write_corpus`].
pub fn read_corpus(path: &Path) -> Result<Vec<CorpusDoc>, crate::jsonl::JsonlError> {
    crate::jsonl::read_jsonl(path)
}
