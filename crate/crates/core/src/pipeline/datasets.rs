//! Dataset assembly from joined stage records.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{CritiqueRecord, DraftRecord, RefineRecord, Task};
use crate::corpus::CorpusDoc;

/// One instruction-tuning example: instruction + document in, target out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftExample {
    pub instruction: String,
    pub html: String,
    pub target_output: String,
    pub task: Task,
}

/// One critique-training example: the reviewing input (document + refined
/// output) and the expected verdict-plus-explanation answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritiqueExample {
    pub input: String,
    pub output: String,
    pub verdict: bool,
}

/// One preference pair: the critique-approved refined output against the
/// original draft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpoTriplet {
    pub instruction: String,
    pub html: String,
    pub chosen: String,
    pub rejected: String,
}

/// Run provenance wrapped around every dataset row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow<T> {
    #[serde(flatten)]
    pub example: T,
    pub pipeline_round: u32,
    pub backend_name: String,
    pub created_at: String,
}

/// A document's records across all three stages (present only when no stage
/// skipped it).
#[derive(Debug, Clone, Copy)]
pub struct JoinedRecord<'a> {
    pub doc: &'a CorpusDoc,
    pub draft: &'a DraftRecord,
    pub refine: &'a RefineRecord,
    pub critique: &'a CritiqueRecord,
}

/// SFT-Filtered: exactly the records whose refined output passed critique.
pub fn assemble_sft_filtered(joined: &[JoinedRecord]) -> (Vec<SftExample>, Vec<String>) {
    let examples: Vec<SftExample> = joined
        .iter()
        .filter(|j| j.critique.verdict)
        .map(|j| SftExample {
            instruction: j.draft.instruction.clone(),
            html: j.doc.html.clone(),
            target_output: j.refine.refined_output.clone(),
            task: j.draft.task,
        })
        .collect();
    let mut warnings = Vec::new();
    if examples.is_empty() && !joined.is_empty() {
        warnings.push("no records passed critique; SFT-Filtered dataset is empty".to_string());
    }
    (examples, warnings)
}

fn critique_example(j: &JoinedRecord) -> CritiqueExample {
    let verdict_line = if j.critique.verdict { "PASS" } else { "FAIL" };
    CritiqueExample {
        input: format!("{}\n\nRefined output:\n{}", j.doc.html, j.refine.refined_output),
        output: format!("{verdict_line}\n{}", j.critique.explanation),
        verdict: j.critique.verdict,
    }
}

/// Seeded, order-preserving downsample of `items` to `k` elements.
fn downsample<T: Clone>(items: &[T], k: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<T> {
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, items.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i].clone()).collect()
}

/// SFT-Critique: all records as critique examples, rebalanced so
/// negatives:positives is 1:2. The limiting class is kept whole and the
/// other downsampled (seeded); the result is shuffled with the same seed.
/// Single-class inputs are passed through with a warning.
pub fn assemble_critique_dataset(
    joined: &[JoinedRecord],
    seed: u64,
) -> (Vec<CritiqueExample>, Vec<String>) {
    let mut warnings = Vec::new();
    let mut pos: Vec<CritiqueExample> = Vec::new();
    let mut neg: Vec<CritiqueExample> = Vec::new();
    for j in joined {
        let example = critique_example(j);
        if example.verdict {
            pos.push(example);
        } else {
            neg.push(example);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x6372_6974_6971_7565); // "critique"
    let mut combined = if neg.is_empty() || pos.is_empty() {
        if !joined.is_empty() {
            warnings.push(format!(
                "critique dataset is single-class ({} positive, {} negative); emitting it unbalanced",
                pos.len(),
                neg.len()
            ));
        }
        let mut all = neg;
        all.extend(pos);
        all
    } else if pos.len() >= neg.len() * 2 {
        let mut kept = neg.clone();
        kept.extend(downsample(&pos, neg.len() * 2, &mut rng));
        kept
    } else {
        let keep_neg = pos.len() / 2;
        if keep_neg == 0 {
            warnings.push(
                "too few positive critiques to keep any negatives at 1:2; emitting positives only"
                    .to_string(),
            );
        }
        let mut kept = downsample(&neg, keep_neg, &mut rng);
        kept.extend(pos);
        kept
    };
    combined.shuffle(&mut rng);
    (combined, warnings)
}

/// DPO-Preference: (chosen = refined, rejected = draft) for records that
/// passed critique and whose refinement changed the draft.
pub fn assemble_dpo(joined: &[JoinedRecord]) -> Vec<DpoTriplet> {
    joined
        .iter()
        .filter(|j| j.critique.verdict && j.refine.changed)
        .map(|j| DpoTriplet {
            instruction: j.draft.instruction.clone(),
            html: j.doc.html.clone(),
            chosen: j.refine.refined_output.clone(),
            rejected: j.draft.draft_output.clone(),
        })
        .collect()
}
