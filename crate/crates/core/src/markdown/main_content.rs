//! Main-content selection: semantic tags first, then link-density scoring.

use crate::html::HtmlNode;

/// Block-level container tags eligible as scored main-content candidates.
/// Headings, inline elements, and the page scaffolding (`body`/`html`/root)
/// are deliberately not candidates: a page whose only blocks are headings
/// must fall back to the whole document rather than a single heading.
const CANDIDATE_TAGS: &[&str] = &[
    "div",
    "section",
    "article",
    "main",
    "td",
    "table",
    "ul",
    "ol",
    "li",
    "p",
    "blockquote",
    "pre",
    "figure",
    "dl",
];

/// Chooses the subtree that carries the page's main content.
///
/// Preference order: the first `main` element, else the first `article`, else
/// the block candidate maximizing `text_len * (1 - link_text_len /
/// max(text_len, 1))`, ties broken by document order. Pages with no
/// positively-scoring candidate return `root` itself.
pub fn score_main_content(root: &HtmlNode) -> &HtmlNode {
    if let Some(main) = root.preorder().find(|n| n.is("main")) {
        return main;
    }
    if let Some(article) = root.preorder().find(|n| n.is("article")) {
        return article;
    }
    let mut best: Option<(&HtmlNode, f64)> = None;
    for node in root.preorder() {
        let Some(tag) = node.tag() else { continue };
        if !CANDIDATE_TAGS.contains(&tag) {
            continue;
        }
        let score = content_score(node);
        if score > 0.0 && best.map_or(true, |(_, s)| score > s) {
            best = Some((node, score));
        }
    }
    best.map_or(root, |(node, _)| node)
}

/// `text_len * (1 - link_text_len / max(text_len, 1))` over collapsed text.
fn content_score(node: &HtmlNode) -> f64 {
    let text_len = node.inner_text().chars().count() as f64;
    let link_len = link_text_len(node, false) as f64;
    text_len * (1.0 - link_len / text_len.max(1.0))
}

/// Collapsed-text length contributed by descendants of `a` elements. Text
/// under nested links is counted once.
fn link_text_len(node: &HtmlNode, in_link: bool) -> usize {
    match node {
        HtmlNode::Element { children, .. } => {
            let inside = in_link || node.is("a");
            if node.is("a") && !in_link {
                // Measure whole links with the same collapsing rule used for
                // the total, so the ratio compares like with like.
                return node.inner_text().chars().count();
            }
            children.iter().map(|c| link_text_len(c, inside)).sum()
        }
        _ => 0,
    }
}
