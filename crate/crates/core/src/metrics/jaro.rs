//! Jaro and Jaro-Winkler string similarity.

/// Standard Jaro similarity. Match window is ⌊max(|a|,|b|)/2⌋−1 (never
/// negative); transpositions are half the matched-but-misordered positions.
/// Both empty → 1, one empty → 0.
pub fn jaro(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_taken = vec![false; b.len()];
    let mut a_matched = vec![false; a.len()];
    let mut matches = 0usize;
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_taken[j] && b[j] == ca {
                b_taken[j] = true;
                a_matched[i] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }
    // Count transpositions: walk both matched sequences in order.
    let mut transpositions = 0usize;
    let mut j = 0usize;
    for (i, &ca) in a.iter().enumerate() {
        if !a_matched[i] {
            continue;
        }
        while !b_taken[j] {
            j += 1;
        }
        if ca != b[j] {
            transpositions += 1;
        }
        j += 1;
    }
    let m = matches as f64;
    let t = (transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Winkler's prefix adjustment: scale 0.1, common prefix capped at 4
/// characters, applied unconditionally (no 0.7 threshold gate).
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    let prefix = a
        .chars()
        .zip(b.chars())
        .take(4)
        .take_while(|(x, y)| x == y)
        .count();
    j + prefix as f64 * 0.1 * (1.0 - j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn martha_marhta() {
        let j = jaro("MARTHA", "MARHTA");
        assert!((j - 0.944444).abs() < 1e-4, "jaro = {j}");
        let jw = jaro_winkler("MARTHA", "MARHTA");
        assert!((jw - 0.9611).abs() < 1e-4, "jw = {jw}");
    }

    #[test]
    fn dixon_dicksonx() {
        // Second classic hand-checked value: jaro 0.7667, prefix 2.
        let jw = jaro_winkler("DIXON", "DICKSONX");
        assert!((jw - 0.8133).abs() < 1e-4, "jw = {jw}");
    }

    #[test]
    fn identical_strings() {
        assert_eq!(jaro_winkler("same", "same"), 1.0);
        assert_eq!(jaro_winkler("", ""), 1.0);
    }

    #[test]
    fn disjoint_strings_are_zero() {
        assert_eq!(jaro("abc", "xyz"), 0.0);
        assert_eq!(jaro_winkler("abc", "xyz"), 0.0);
    }

    #[test]
    fn one_empty_is_zero() {
        assert_eq!(jaro_winkler("", "abc"), 0.0);
        assert_eq!(jaro_winkler("abc", ""), 0.0);
    }

    #[test]
    fn symmetry() {
        for (a, b) in [("MARTHA", "MARHTA"), ("DIXON", "DICKSONX"), ("x", "xy")] {
            assert_eq!(jaro_winkler(a, b), jaro_winkler(b, a));
        }
    }

    #[test]
    fn bounded_in_unit_interval() {
        for (a, b) in [("a", "ab"), ("prefix", "prefixxxxx"), ("ab", "ba")] {
            let v = jaro_winkler(a, b);
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
