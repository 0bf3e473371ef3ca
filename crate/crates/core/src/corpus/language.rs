//! Language identification for corpus filtering.
//!
//! Two stages:
//!
//! 1. **Script histogram.** Counting letters by Unicode script settles the
//!    languages whose writing system is (near-)unambiguous: Hangul → `ko`,
//!    Han/kana → `zh`/`ja`, Cyrillic → `ru`, plus Arabic, Hebrew, Greek, and
//!    Thai. The Cyrillic and Arabic buckets report the dominant family member;
//!    distinguishing e.g. Bulgarian from Russian is out of scope for this
//!    detector.
//! 2. **Character trigrams.** Latin-script text is classified with a
//!    Cavnar–Trenkle rank profile: the top 300 character trigrams of the text
//!    are compared against per-language profiles built at first use from the
//!    bundled seed corpora, using out-of-place distance with a fixed penalty
//!    for missing trigrams. The language with the smallest distance wins.
//!
//! Texts that give the classifier too little signal (fewer than
//! [`MIN_DISTINCT_TRIGRAMS`] distinct trigrams, or no letters at all) come
//! back as `"und"`.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Number of top-ranked trigrams kept per profile.
const PROFILE_SIZE: usize = 300;

/// Out-of-place distance charged when a text trigram is absent from a
/// language profile (the maximum possible rank displacement).
const MISSING_PENALTY: u64 = PROFILE_SIZE as u64;

/// Minimum number of distinct trigrams required before the Latin-script
/// classifier will commit to a language.
const MIN_DISTINCT_TRIGRAMS: usize = 10;

/// Seed corpora for the Latin-script languages the trigram classifier knows.
const SEED_TEXTS: &[(&str, &str)] = &[
    ("cs", include_str!("../../data/lang/cs.txt")),
    ("de", include_str!("../../data/lang/de.txt")),
    ("en", include_str!("../../data/lang/en.txt")),
    ("es", include_str!("../../data/lang/es.txt")),
    ("fr", include_str!("../../data/lang/fr.txt")),
    ("it", include_str!("../../data/lang/it.txt")),
    ("nl", include_str!("../../data/lang/nl.txt")),
    ("pl", include_str!("../../data/lang/pl.txt")),
    ("pt", include_str!("../../data/lang/pt.txt")),
    ("ro", include_str!("../../data/lang/ro.txt")),
    ("sv", include_str!("../../data/lang/sv.txt")),
    ("tr", include_str!("../../data/lang/tr.txt")),
];

type Trigram = [char; 3];

/// A rank profile: trigram → rank (0 = most frequent).
struct LangProfile {
    code: &'static str,
    ranks: HashMap<Trigram, u64>,
}

fn profiles() -> &'static [LangProfile] {
    static PROFILES: OnceLock<Vec<LangProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        SEED_TEXTS
            .iter()
            .map(|(code, text)| LangProfile {
                code,
                ranks: rank_map(&ranked_trigrams(text)),
            })
            .collect()
    })
}

/// Lowercases, maps every non-alphabetic run to a single space, and pads the
/// ends so word-boundary trigrams are captured.
fn normalize(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for ch in text.chars() {
        if ch.is_alphabetic() {
            out.extend(ch.to_lowercase());
        } else if out.last() != Some(&' ') {
            out.push(' ');
        }
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

/// Trigrams of the normalized text ranked by descending frequency,
/// ties broken by trigram order for determinism. Truncated to PROFILE_SIZE.
fn ranked_trigrams(text: &str) -> Vec<Trigram> {
    let chars = normalize(text);
    let mut counts: HashMap<Trigram, u64> = HashMap::new();
    for w in chars.windows(3) {
        let tri = [w[0], w[1], w[2]];
        *counts.entry(tri).or_insert(0) += 1;
    }
    let mut ranked: Vec<(Trigram, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(PROFILE_SIZE);
    ranked.into_iter().map(|(t, _)| t).collect()
}

fn rank_map(ranked: &[Trigram]) -> HashMap<Trigram, u64> {
    ranked
        .iter()
        .enumerate()
        .map(|(i, t)| (*t, i as u64))
        .collect()
}

/// Cavnar–Trenkle out-of-place distance between a text's ranked trigrams and
/// a language profile.
fn out_of_place(text_ranked: &[Trigram], profile: &HashMap<Trigram, u64>) -> u64 {
    text_ranked
        .iter()
        .enumerate()
        .map(|(i, t)| match profile.get(t) {
            Some(&rank) => (i as u64).abs_diff(rank),
            None => MISSING_PENALTY,
        })
        .sum()
}

fn classify_latin(text: &str) -> String {
    let ranked = ranked_trigrams(text);
    if ranked.len() < MIN_DISTINCT_TRIGRAMS {
        return "und".to_string();
    }
    let mut best: Option<(&str, u64)> = None;
    for profile in profiles() {
        let d = out_of_place(&ranked, &profile.ranks);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((profile.code, d));
        }
    }
    best.map_or_else(|| "und".to_string(), |(code, _)| code.to_string())
}

struct ScriptCounts {
    letters: u64,
    latin: u64,
    han: u64,
    kana: u64,
    hangul: u64,
    cyrillic: u64,
    arabic: u64,
    hebrew: u64,
    greek: u64,
    thai: u64,
}

fn count_scripts(text: &str) -> ScriptCounts {
    let mut c = ScriptCounts {
        letters: 0,
        latin: 0,
        han: 0,
        kana: 0,
        hangul: 0,
        cyrillic: 0,
        arabic: 0,
        hebrew: 0,
        greek: 0,
        thai: 0,
    };
    for ch in text.chars() {
        if !ch.is_alphabetic() {
            continue;
        }
        c.letters += 1;
        let cp = ch as u32;
        match cp {
            // Basic Latin letters, Latin-1 letters, Latin Extended-A/B.
            0x0041..=0x024F => c.latin += 1,
            // Greek and Coptic.
            0x0370..=0x03FF => c.greek += 1,
            // Cyrillic + supplement.
            0x0400..=0x052F => c.cyrillic += 1,
            // Hebrew.
            0x0590..=0x05FF => c.hebrew += 1,
            // Arabic + supplement.
            0x0600..=0x077F => c.arabic += 1,
            // Thai.
            0x0E00..=0x0E7F => c.thai += 1,
            // Hangul Jamo.
            0x1100..=0x11FF => c.hangul += 1,
            // Hiragana and Katakana.
            0x3040..=0x30FF => c.kana += 1,
            // CJK Unified Ideographs Extension A + main block.
            0x3400..=0x4DBF | 0x4E00..=0x9FFF => c.han += 1,
            // Hangul syllables.
            0xAC00..=0xD7AF => c.hangul += 1,
            _ => {}
        }
    }
    c
}

/// Classifies already-extracted visible text. Returns an ISO-639-1 code or
/// `"und"` when there is not enough signal. Length gating (the 40-character
/// floor) is the caller's job; this function classifies whatever it is given.
pub(crate) fn classify_text(text: &str) -> String {
    let c = count_scripts(text);
    if c.letters == 0 {
        return "und".to_string();
    }
    let total = c.letters as f64;
    let cjk = c.han + c.kana;
    if c.hangul as f64 / total > 0.3 {
        return "ko".to_string();
    }
    if cjk as f64 / total > 0.3 {
        // Any meaningful share of kana marks Japanese; pure ideographs → Chinese.
        if cjk > 0 && c.kana as f64 / cjk as f64 > 0.02 {
            return "ja".to_string();
        }
        return "zh".to_string();
    }
    if c.cyrillic as f64 / total > 0.5 {
        return "ru".to_string();
    }
    if c.arabic as f64 / total > 0.5 {
        return "ar".to_string();
    }
    if c.hebrew as f64 / total > 0.5 {
        return "he".to_string();
    }
    if c.greek as f64 / total > 0.5 {
        return "el".to_string();
    }
    if c.thai as f64 / total > 0.5 {
        return "th".to_string();
    }
    if c.latin as f64 / total >= 0.5 {
        return classify_latin(text);
    }
    "und".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_corpora_classify_as_themselves() {
        for (code, text) in SEED_TEXTS {
            assert_eq!(&classify_text(text), code, "seed corpus for {code}");
        }
    }

    #[test]
    fn script_buckets() {
        assert_eq!(classify_text("오늘 아침에는 하늘이 맑고 바람이 시원했다"), "ko");
        assert_eq!(classify_text("今日は朝から雨が降っていて、傘を持って出かけた"), "ja");
        assert_eq!(classify_text("今天早上天气很好我们一起去公园散步然后喝茶"), "zh");
        assert_eq!(
            classify_text("Сегодня утром было холодно, и мы остались дома читать книги"),
            "ru"
        );
        assert_eq!(
            classify_text("في الصباح الباكر خرجنا إلى السوق لشراء الخبز والفواكه الطازجة"),
            "ar"
        );
        assert_eq!(classify_text("הבוקר יצאנו לטייל בפארק וראינו ציפורים רבות על העצים"), "he");
        assert_eq!(
            classify_text("Σήμερα το πρωί περπατήσαμε δίπλα στη θάλασσα και ήπιαμε καφέ"),
            "el"
        );
        assert_eq!(classify_text("เช้านี้อากาศดีมากเราเดินเล่นในสวนและดื่มกาแฟร้อน"), "th");
    }

    #[test]
    fn no_letters_is_und() {
        assert_eq!(classify_text("12345 67890 !!! ???"), "und");
        assert_eq!(classify_text(""), "und");
    }

    #[test]
    fn too_few_trigrams_is_und() {
        assert_eq!(classify_text("ab"), "und");
    }

    #[test]
    fn profiles_are_capped() {
        for p in profiles() {
            assert!(p.ranks.len() <= PROFILE_SIZE);
            assert!(p.ranks.len() >= MIN_DISTINCT_TRIGRAMS);
        }
    }
}
