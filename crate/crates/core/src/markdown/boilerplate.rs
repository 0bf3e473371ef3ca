//! Boilerplate removal: drop navigation, chrome, scripts, and ad-like
//! subtrees before content extraction.

use crate::html::{push_merged, HtmlNode};

/// Tags removed wholesale together with their subtrees.
const BOILERPLATE_TAGS: &[&str] = &[
    "nav", "footer", "aside", "form", "iframe", "noscript", "script", "style",
];

/// Case-insensitive substrings matched against `class` and `id` attribute
/// values; a hit removes the whole subtree. The set approximates the usual
/// navigation/advertising chrome.
const BOILERPLATE_PATTERNS: &[&str] = &[
    "nav", "menu", "footer", "sidebar", "banner", "ad-", "-ad", "advert", "promo", "cookie",
    "popup",
];

/// Returns a copy of `root` with boilerplate removed: elements with the tags
/// above, comments, and any element whose `class` or `id` contains one of the
/// boilerplate patterns (case-insensitive). Removal is whole-subtree. A tree
/// without boilerplate comes back structurally identical.
pub fn strip_boilerplate(root: &HtmlNode) -> HtmlNode {
    match root {
        HtmlNode::Element {
            tag,
            attrs,
            children,
        } => {
            let mut kept = Vec::with_capacity(children.len());
            for child in children {
                if is_boilerplate(child) {
                    continue;
                }
                push_merged(&mut kept, strip_boilerplate(child));
            }
            HtmlNode::Element {
                tag: tag.clone(),
                attrs: attrs.clone(),
                children: kept,
            }
        }
        other => other.clone(),
    }
}

fn is_boilerplate(node: &HtmlNode) -> bool {
    match node {
        HtmlNode::Comment(_) => true,
        HtmlNode::Element { tag, .. } => {
            if BOILERPLATE_TAGS.contains(&tag.as_str()) {
                return true;
            }
            ["class", "id"].iter().any(|attr| {
                node.attr(attr).is_some_and(|value| {
                    let lower = value.to_ascii_lowercase();
                    BOILERPLATE_PATTERNS.iter().any(|p| lower.contains(p))
                })
            })
        }
        _ => false,
    }
}
