//! Character-level edit distances over Unicode scalar values.

/// Plain Levenshtein distance (insert / delete / substitute, unit costs).
pub fn levenshtein_abs(a: &str, b: &str) -> u64 {
    if a == b {
        return 0;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len() as u64;
    }
    if b.is_empty() {
        return a.len() as u64;
    }
    // Two-row DP; keep the shorter string on the row axis.
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let mut prev: Vec<u64> = (0..=short.len() as u64).collect();
    let mut curr: Vec<u64> = vec![0; short.len() + 1];
    for (i, &lc) in long.iter().enumerate() {
        curr[0] = i as u64 + 1;
        for (j, &sc) in short.iter().enumerate() {
            let cost = u64::from(lc != sc);
            curr[j + 1] = (prev[j + 1] + 1).min(curr[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// Levenshtein distance divided by the longer length; both empty → 0.
pub fn levenshtein_norm(a: &str, b: &str) -> f64 {
    if a == b {
        return 0.0;
    }
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 0.0;
    }
    levenshtein_abs(a, b) as f64 / max_len as f64
}

/// Optimal-string-alignment distance: Levenshtein plus adjacent
/// transposition, with the OSA restriction that no substring is edited
/// twice. Absolute (un-normalized) count.
pub fn damerau_abs(a: &str, b: &str) -> u64 {
    if a == b {
        return 0;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len() as u64;
    }
    if b.is_empty() {
        return a.len() as u64;
    }
    // Three rolling rows: i-2, i-1, i.
    let w = b.len() + 1;
    let mut row_prev2: Vec<u64> = vec![0; w];
    let mut row_prev: Vec<u64> = (0..w as u64).collect();
    let mut row: Vec<u64> = vec![0; w];
    for i in 1..=a.len() {
        row[0] = i as u64;
        for j in 1..=b.len() {
            let cost = u64::from(a[i - 1] != b[j - 1]);
            let mut best = (row_prev[j] + 1)
                .min(row[j - 1] + 1)
                .min(row_prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(row_prev2[j - 2] + 1);
            }
            row[j] = best;
        }
        // Rotate: row_prev2 ← row i-1, row_prev ← row i, row ← scratch.
        std::mem::swap(&mut row_prev2, &mut row_prev);
        std::mem::swap(&mut row_prev, &mut row);
    }
    row_prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kitten_sitting() {
        assert_eq!(levenshtein_abs("kitten", "sitting"), 3);
        let norm = levenshtein_norm("kitten", "sitting");
        assert!((norm - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn empty_cases() {
        assert_eq!(levenshtein_norm("", ""), 0.0);
        assert_eq!(levenshtein_norm("", "abc"), 1.0);
        assert_eq!(levenshtein_norm("abc", ""), 1.0);
        assert_eq!(damerau_abs("", ""), 0);
        assert_eq!(damerau_abs("", "ab"), 2);
    }

    #[test]
    fn equal_strings_are_zero() {
        assert_eq!(levenshtein_norm("same", "same"), 0.0);
        assert_eq!(damerau_abs("same", "same"), 0);
    }

    #[test]
    fn single_transposition_costs_one() {
        assert_eq!(damerau_abs("ab", "ba"), 1);
        // Plain Levenshtein needs two edits for the same pair.
        assert_eq!(levenshtein_abs("ab", "ba"), 2);
    }

    #[test]
    fn osa_distinguishing_case() {
        // Unrestricted Damerau gives 2 here; OSA must give 3.
        assert_eq!(damerau_abs("ca", "abc"), 3);
        assert_eq!(damerau_abs("abc", "ca"), 3);
    }

    #[test]
    fn symmetry() {
        let pairs = [("kitten", "sitting"), ("ab", "ba"), ("", "xy"), ("ăbç", "çbă")];
        for (a, b) in pairs {
            assert_eq!(levenshtein_abs(a, b), levenshtein_abs(b, a));
            assert_eq!(damerau_abs(a, b), damerau_abs(b, a));
        }
    }

    #[test]
    fn multibyte_chars_count_as_single_units() {
        assert_eq!(levenshtein_abs("héllo", "hello"), 1);
        assert_eq!(damerau_abs("日本", "本日"), 1);
    }

    #[test]
    fn osa_never_below_levenshtein_minus_allowed() {
        // OSA ≤ Levenshtein always (transposition only adds an option).
        let pairs = [("ca", "abc"), ("kitten", "sitting"), ("abcdef", "badcfe")];
        for (a, b) in pairs {
            assert!(damerau_abs(a, b) <= levenshtein_abs(a, b));
        }
    }
}
