//! Lenient-parser fuzz: 10,000 adversarial inputs. The parser must never
//! panic, must always produce a root, and serialize → reparse must be a
//! fixed point (the serialized form is unambiguous).

use htmlsift_core::html::{parse_html, parse_str};
use htmlsift_core::synthgen::{synth_corpus, synth_doc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAG_SOUP_PIECES: &[&str] = &[
    "<div>", "</div>", "<p>", "</p>", "<span", ">", "<b>", "</i>", "<table><tr><td>",
    "</span></b>", "<a href='", "'>", "<li>item", "<ul>", "</ol>", "text & more",
    "<!-- comment", "-->", "<![CDATA[x]]>", "<?php echo ?>", "<script>var a = '<div>';",
    "</script>", "<style>p { color: red }", "</style>", "<img src=x", "<br/>", "<BR>",
    "&amp;", "&nbsp;", "&#65;", "&#x41;", "&bogus;", "&", "<", ">", "\"", "'",
    "<input type=\"text\" value='mixed\">", "<h1>", "</h3>", "<td>cell", "</table>",
    "<=not a tag", "< div>", "<div class=>", "<div ==x>", "<!doctype html>",
    "<meta charset=\"utf-8\">", "\u{feff}", "é中ß", "<em><strong>nested",
];

fn random_soup(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..40);
    let mut out = String::new();
    for _ in 0..n {
        out.push_str(TAG_SOUP_PIECES[rng.gen_range(0..TAG_SOUP_PIECES.len())]);
    }
    out
}

fn mutate(rng: &mut ChaCha8Rng, doc: &str) -> String {
    let mut bytes = doc.as_bytes().to_vec();
    match rng.gen_range(0..4) {
        // Truncate mid-document (possibly mid-tag, mid-entity, mid-UTF-8).
        0 => {
            let cut = rng.gen_range(0..=bytes.len());
            bytes.truncate(cut);
        }
        // Flip random bytes.
        1 => {
            for _ in 0..rng.gen_range(1..8) {
                if bytes.is_empty() {
                    break;
                }
                let i = rng.gen_range(0..bytes.len());
                bytes[i] = rng.gen();
            }
        }
        // Delete a random slice.
        2 => {
            if bytes.len() > 2 {
                let a = rng.gen_range(0..bytes.len());
                let b = rng.gen_range(a..bytes.len());
                bytes.drain(a..b);
            }
        }
        // Duplicate a random slice (unbalances tags).
        _ => {
            if bytes.len() > 2 {
                let a = rng.gen_range(0..bytes.len());
                let b = rng.gen_range(a..bytes.len().min(a + 64));
                let slice: Vec<u8> = bytes[a..b].to_vec();
                let at = rng.gen_range(0..=bytes.len());
                for (k, byte) in slice.into_iter().enumerate() {
                    bytes.insert(at + k, byte);
                }
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

/// serialize(parse(x)) must be a fixed point of parse∘serialize.
fn assert_roundtrip_stable(input: &str) {
    let once = parse_str(input).serialize();
    let twice = parse_str(&once).serialize();
    assert_eq!(once, twice, "serialize/reparse not a fixed point for input: {input:?}");
}

#[test]
fn fuzz_10k_inputs_never_panic_and_roundtrip_stably() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0_22_D00D);
    let seeds = synth_corpus(42, 25);
    for case in 0..10_000usize {
        let input = match case % 4 {
            // Pure random soup assembled from hostile fragments.
            0 => random_soup(&mut rng),
            // Random bytes (exercises the decoder path too).
            1 => {
                let n = rng.gen_range(0..200);
                let bytes: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
                let root = parse_html(&bytes, None);
                root.serialize() // must not panic
            }
            // Mutated well-formed documents.
            _ => {
                let doc = &seeds[rng.gen_range(0..seeds.len())];
                mutate(&mut rng, doc)
            }
        };
        let root = parse_str(&input);
        assert!(root.is_root());
        // inner_text never panics either.
        let _ = root.inner_text();
        assert_roundtrip_stable(&input);
    }
}

#[test]
fn synthetic_documents_roundtrip_exactly() {
    for i in 0..50 {
        let doc = synth_doc(7, i);
        assert_roundtrip_stable(&doc);
    }
}

#[test]
fn known_pathologies_are_absorbed() {
    let cases = [
        "",
        "   ",
        "<",
        "<<>>",
        "</",
        "</unopened>",
        "<p><p><p>",
        "<b><i>cross</b></i>",
        "<a href=<b>>weird</a>",
        "<div style=\"a; b: c\"",
        "<!-- never closed",
        "<script>while(1){if(a<b)break;}",
        "text only, no markup at all",
        "<table><div>straddle</table></div>",
        "\u{0}\u{1}\u{2}control bytes",
        "<p>&#xD800;</p>", // lone surrogate reference
        "<p>&#1114112;</p>", // out-of-range reference
    ];
    for case in cases {
        let root = parse_str(case);
        assert!(root.is_root());
        assert_roundtrip_stable(case);
    }
}
