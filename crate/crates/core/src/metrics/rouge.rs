//! ROUGE-L: longest-common-subsequence F1 over whitespace tokens.

/// Tokens are maximal non-whitespace runs, so Markdown punctuation stays
/// attached to its word (`**bold**` is one token). Returns F1 with β=1:
/// P = LCS/|candidate|, R = LCS/|reference|. Both empty → 1, one empty → 0.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    let cand: Vec<&str> = candidate.split_whitespace().collect();
    let refr: Vec<&str> = reference.split_whitespace().collect();
    match (cand.is_empty(), refr.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let lcs = lcs_len(&cand, &refr) as f64;
    let p = lcs / cand.len() as f64;
    let r = lcs / refr.len() as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Two-row LCS over token slices; the shorter sequence is the row axis.
fn lcs_len(a: &[&str], b: &[&str]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut curr = vec![0usize; short.len() + 1];
    for &lt in long {
        for (j, &st) in short.iter().enumerate() {
            curr[j + 1] = if lt == st {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_score_one() {
        assert_eq!(rouge_l("a b c", "a b c"), 1.0);
    }

    #[test]
    fn the_cat_sat() {
        let f1 = rouge_l("the cat sat", "the cat");
        assert!((f1 - 0.8).abs() < 1e-12, "f1 = {f1}");
    }

    #[test]
    fn disjoint_vocabulary_scores_zero() {
        assert_eq!(rouge_l("a b", "x y"), 0.0);
    }

    #[test]
    fn empty_conventions() {
        assert_eq!(rouge_l("", ""), 1.0);
        assert_eq!(rouge_l("a", ""), 0.0);
        assert_eq!(rouge_l("", "a"), 0.0);
    }

    #[test]
    fn whitespace_runs_do_not_matter() {
        assert_eq!(rouge_l("a  b\t\nc", "a b c"), 1.0);
        assert_eq!(
            rouge_l("x   y", "x q y"),
            rouge_l("x y", "x q y")
        );
    }

    #[test]
    fn markdown_punctuation_stays_attached() {
        // "**bold**" is a single token distinct from "bold".
        assert!(rouge_l("**bold**", "bold") < 1.0);
        assert_eq!(rouge_l("**bold**", "**bold**"), 1.0);
    }

    #[test]
    fn subsequence_not_substring() {
        // LCS "a c" has length 2 even though not contiguous in candidate.
        let f1 = rouge_l("a x c", "a c");
        let p: f64 = 2.0 / 3.0;
        let r: f64 = 1.0;
        let expect = 2.0 * p * r / (p + r);
        assert!((f1 - expect).abs() < 1e-12);
    }
}
