//! Deterministic synthetic HTML documents and random DOM trees.
//!
//! Two generators share a seeded ChaCha stream:
//!
//! - [`synth_doc`] emits a *messy* HTML page as text — unclosed paragraphs,
//!   boilerplate chrome, entities, uppercase tags — for corpus fixtures,
//!   pipeline runs, and throughput measurement.
//! - [`random_content_tree`] builds a well-formed [`HtmlNode`] tree directly,
//!   restricted to a text alphabet free of Markdown metacharacters, for the
//!   text-preservation property.

use crate::html::HtmlNode;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Word bank: lowercase ASCII letters only, so generated text contains no
/// Markdown metacharacters, digits, or punctuation.
pub const WORDS: &[&str] = &[
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliett",
    "kilo", "lima", "mike", "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango",
    "uniform", "victor", "whiskey", "xray", "yankee", "zulu", "amber", "birch", "cedar", "dune",
    "ember", "fjord", "grove", "harbor", "inlet", "jetty", "knoll", "lagoon", "meadow", "nectar",
    "orchard", "prairie", "quarry", "ridge", "summit", "thicket", "upland", "valley", "willow",
    "zenith", "basalt", "cobalt", "damson", "emerald", "flint", "garnet", "hazel", "indigo",
    "jasper", "kelp", "lichen", "marble", "nickel", "opal",
];

/// Independent deterministic stream per (seed, stream) pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn word(rng: &mut ChaCha8Rng) -> &'static str {
    WORDS[rng.gen_range(0..WORDS.len())]
}

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word(rng));
    }
    out
}

/// `words` with a count drawn from `lo..hi`.
fn words_r(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> String {
    let n = rng.gen_range(lo..hi);
    words(rng, n)
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let mut s = words_r(rng, 5, 14);
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

// ---------------------------------------------------------------------------
// Messy HTML document strings
// ---------------------------------------------------------------------------

/// One deterministic messy HTML page. The same (seed, index) always produces
/// identical bytes.
pub fn synth_doc(seed: u64, index: usize) -> String {
    let mut rng = rng_for(seed, index as u64);
    let title = words(&mut rng, 3);
    let mut html = String::with_capacity(4096);
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n");
    html.push_str(&format!("<meta charset=\"utf-8\">\n<title>{title}</title>\n"));
    html.push_str("<style>body { margin: 0; } .ad-banner { color: red; }</style>\n");
    html.push_str("</head>\n<body>\n");
    html.push_str("<nav class=\"menu\"><ul><li><a href=\"/home\">home</a></li><li><a href=\"/about\">about</a></li></ul></nav>\n");
    if rng.gen_bool(0.4) {
        html.push_str("<div class=\"ad-banner\">sponsored content</div>\n");
    }
    html.push_str("<main>\n<article>\n");
    html.push_str(&format!("<H1>{}</H1>\n", words_r(&mut rng, 2, 5)));
    let paragraphs = rng.gen_range(3..9);
    for p in 0..paragraphs {
        // Half the paragraphs are left unclosed: the parser must recover.
        let close = rng.gen_bool(0.5);
        html.push_str("<p>");
        html.push_str(&sentence(&mut rng));
        match rng.gen_range(0..4) {
            0 => html.push_str(&format!(" <b>{}</b> {}", word(&mut rng), sentence(&mut rng))),
            1 => html.push_str(&format!(
                " <a href=\"/{}\">{}</a> {}",
                word(&mut rng),
                words(&mut rng, 2),
                sentence(&mut rng)
            )),
            2 => html.push_str(&format!(" <em>{}</em> &amp; {}", word(&mut rng), sentence(&mut rng))),
            _ => {}
        }
        if close {
            html.push_str("</p>\n");
        } else {
            html.push('\n');
        }
        if p == 1 && rng.gen_bool(0.5) {
            html.push_str(&format!(
                "<h2>{}</h2>\n",
                words_r(&mut rng, 2, 4)
            ));
        }
    }
    if rng.gen_bool(0.6) {
        html.push_str("<ul>\n");
        for _ in 0..rng.gen_range(2..6) {
            html.push_str(&format!("<li>{}\n", words_r(&mut rng, 2, 6)));
        }
        html.push_str("</ul>\n");
    }
    if rng.gen_bool(0.35) {
        html.push_str("<table>\n<tr><th>name</th><th>value</th></tr>\n");
        for _ in 0..rng.gen_range(1..4) {
            html.push_str(&format!(
                "<tr><td>{}</td><td>{}</td>\n",
                word(&mut rng),
                word(&mut rng)
            ));
        }
        html.push_str("</table>\n");
    }
    if rng.gen_bool(0.25) {
        html.push_str(&format!(
            "<pre><code>let {} = {};\n</code></pre>\n",
            word(&mut rng),
            word(&mut rng)
        ));
    }
    html.push_str("</article>\n</main>\n");
    html.push_str("<aside class=\"sidebar\">related links</aside>\n");
    html.push_str(&format!(
        "<footer>&copy; {} corp</footer>\n<script>var x = 1 < 2;</script>\n",
        word(&mut rng)
    ));
    html.push_str("</body>\n</html>\n");
    html
}

/// A batch of deterministic documents.
pub fn synth_corpus(seed: u64, count: usize) -> Vec<String> {
    (0..count).map(|i| synth_doc(seed, i)).collect()
}

// ---------------------------------------------------------------------------
// Random well-formed trees (text-preservation property)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub max_blocks: usize,
}

impl Default for TreeConfig {
    fn default() -> TreeConfig {
        TreeConfig {
            max_depth: 3,
            max_blocks: 6,
        }
    }
}

/// Builds a random document tree whose every text node draws from [`WORDS`].
/// Sibling blocks, list items, and table cells are separated by whitespace
/// text nodes (as pretty-printed HTML would be), so the tree's `inner_text`
/// and the rendered Markdown agree about word boundaries.
pub fn random_content_tree(rng: &mut ChaCha8Rng, cfg: &TreeConfig) -> HtmlNode {
    let n = rng.gen_range(1..=cfg.max_blocks);
    let mut children = Vec::new();
    for i in 0..n {
        if i > 0 {
            children.push(HtmlNode::text("\n"));
        }
        children.push(gen_block(rng, cfg, 0));
    }
    HtmlNode::document(children)
}

fn gen_block(rng: &mut ChaCha8Rng, cfg: &TreeConfig, depth: usize) -> HtmlNode {
    let roll = if depth >= cfg.max_depth {
        // Leaf levels: paragraphs and headings only.
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..10)
    };
    match roll {
        0 | 1 => match rng.gen_range(0..3) {
            0 => heading(rng),
            _ => paragraph(rng),
        },
        2 | 3 => paragraph(rng),
        4 => list(rng, cfg, depth),
        5 => table(rng),
        6 => blockquote(rng, cfg, depth),
        7 => pre_block(rng),
        8 => figure(rng),
        _ => container(rng, cfg, depth),
    }
}

fn inline_run(rng: &mut ChaCha8Rng, allow_breaks: bool) -> Vec<HtmlNode> {
    let mut children = Vec::new();
    let segments = rng.gen_range(1..=5);
    for i in 0..segments {
        if i > 0 {
            children.push(HtmlNode::text(" "));
        }
        match rng.gen_range(0..10) {
            0 => children.push(HtmlNode::element(
                ["b", "strong"][rng.gen_range(0..2)],
                vec![HtmlNode::text(&words_r(rng, 1, 3))],
            )),
            1 => children.push(HtmlNode::element(
                ["i", "em"][rng.gen_range(0..2)],
                vec![HtmlNode::text(&words_r(rng, 1, 3))],
            )),
            2 => children.push(HtmlNode::element(
                "del",
                vec![HtmlNode::text(word(rng))],
            )),
            3 => children.push(HtmlNode::element(
                "code",
                vec![HtmlNode::text(&words_r(rng, 1, 3))],
            )),
            4 => children.push(HtmlNode::element_with_attrs(
                "a",
                vec![("href".to_string(), format!("/{}", word(rng)))],
                vec![HtmlNode::text(&words_r(rng, 1, 3))],
            )),
            5 => children.push(HtmlNode::element_with_attrs(
                "img",
                vec![
                    ("src".to_string(), format!("/{}.png", word(rng))),
                    ("alt".to_string(), word(rng).to_string()),
                ],
                vec![],
            )),
            6 if allow_breaks => {
                children.push(HtmlNode::element("br", vec![]));
            }
            _ => children.push(HtmlNode::text(&words_r(rng, 1, 5))),
        }
    }
    children
}

fn paragraph(rng: &mut ChaCha8Rng) -> HtmlNode {
    HtmlNode::element("p", inline_run(rng, true))
}

fn heading(rng: &mut ChaCha8Rng) -> HtmlNode {
    let level = rng.gen_range(1..=6);
    HtmlNode::element(
        &format!("h{level}"),
        vec![HtmlNode::text(&words_r(rng, 1, 4))],
    )
}

fn list(rng: &mut ChaCha8Rng, cfg: &TreeConfig, depth: usize) -> HtmlNode {
    let tag = ["ul", "ol"][rng.gen_range(0..2)];
    let mut children = Vec::new();
    for i in 0..rng.gen_range(2..=4) {
        if i > 0 {
            children.push(HtmlNode::text("\n"));
        }
        let mut item = inline_run(rng, false);
        if depth < cfg.max_depth && rng.gen_bool(0.25) {
            item.push(HtmlNode::text("\n"));
            item.push(list(rng, cfg, cfg.max_depth)); // one nesting level
        }
        children.push(HtmlNode::element("li", item));
    }
    HtmlNode::element(tag, children)
}

fn table(rng: &mut ChaCha8Rng) -> HtmlNode {
    let cols = rng.gen_range(1..=3);
    let rows = rng.gen_range(1..=3);
    let mut children = Vec::new();
    if rng.gen_bool(0.3) {
        children.push(HtmlNode::element(
            "caption",
            vec![HtmlNode::text(&words(rng, 2))],
        ));
        children.push(HtmlNode::text("\n"));
    }
    for r in 0..rows {
        if !children.is_empty() {
            children.push(HtmlNode::text("\n"));
        }
        let cell_tag = if r == 0 && rng.gen_bool(0.5) { "th" } else { "td" };
        let mut row = Vec::new();
        for c in 0..cols {
            if c > 0 {
                row.push(HtmlNode::text(" "));
            }
            row.push(HtmlNode::element(
                cell_tag,
                vec![HtmlNode::text(&words_r(rng, 1, 3))],
            ));
        }
        children.push(HtmlNode::element("tr", row));
    }
    HtmlNode::element("table", children)
}

fn blockquote(rng: &mut ChaCha8Rng, cfg: &TreeConfig, depth: usize) -> HtmlNode {
    let mut children = Vec::new();
    for i in 0..rng.gen_range(1..=2) {
        if i > 0 {
            children.push(HtmlNode::text("\n"));
        }
        children.push(gen_block(rng, cfg, depth + 1));
    }
    HtmlNode::element("blockquote", children)
}

fn pre_block(rng: &mut ChaCha8Rng) -> HtmlNode {
    let mut body = String::new();
    for _ in 0..rng.gen_range(1..=3) {
        body.push_str(&words_r(rng, 2, 5));
        body.push('\n');
    }
    HtmlNode::element("pre", vec![HtmlNode::text(&body)])
}

fn figure(rng: &mut ChaCha8Rng) -> HtmlNode {
    HtmlNode::element(
        "figure",
        vec![
            HtmlNode::element_with_attrs(
                "img",
                vec![
                    ("src".to_string(), format!("/{}.png", word(rng))),
                    ("alt".to_string(), word(rng).to_string()),
                ],
                vec![],
            ),
            HtmlNode::text("\n"),
            HtmlNode::element("figcaption", vec![HtmlNode::text(&words(rng, 3))]),
        ],
    )
}

fn container(rng: &mut ChaCha8Rng, cfg: &TreeConfig, depth: usize) -> HtmlNode {
    let tag = ["div", "section", "article"][rng.gen_range(0..3)];
    let mut children = Vec::new();
    for i in 0..rng.gen_range(1..=3) {
        if i > 0 {
            children.push(HtmlNode::text("\n"));
        }
        children.push(gen_block(rng, cfg, depth + 1));
    }
    HtmlNode::element(tag, children)
}
