//! Lenient DOM for tag-soup HTML.
//!
//! [`HtmlNode`] is a simplified immutable tree: elements with lowercase tags
//! and ordered attributes, text, comments, and raw-text blocks (script/style
//! bodies). [`parse_html`] never fails; see `parser.rs` for the recovery
//! rules. Serialization is normalized so that re-parsing a serialized tree
//! reproduces it structurally.

mod parser;
mod selector;

pub use parser::{decode_bytes, parse_html, parse_str};
pub use selector::{select, step_matches, Selector, SelectorParseError, SelectorStep};

use std::fmt::Write as _;

/// Tag of the synthetic document root produced by [`parse_html`]. The root is
/// an ordinary [`HtmlNode::Element`] so every traversal treats it uniformly,
/// but it is never matched by selectors (selector tag syntax cannot express
/// `#document`) and serialization emits only its children.
pub const ROOT_TAG: &str = "#document";

/// Elements that never have children and never emit a closing tag.
pub const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

/// Elements whose bodies are captured verbatim as [`HtmlNode::RawText`].
pub const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style"];

/// Maximum element nesting depth; opens beyond this are flattened into the
/// current element so that adversarial input cannot overflow recursion in
/// later traversals.
pub const MAX_DEPTH: usize = 256;

/// One node of the lenient DOM.
///
/// Invariants maintained by the parser and all tree-rewriting operations:
/// element tags and attribute names are lowercase; void elements have no
/// children; `RawText` appears only as the sole child of `script`/`style`;
/// adjacent `Text` siblings are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HtmlNode {
    /// An element: lowercase tag, ordered (name, value) attributes, children.
    Element {
        tag: String,
        attrs: Vec<(String, String)>,
        children: Vec<HtmlNode>,
    },
    /// A run of document text (entities already decoded).
    Text(String),
    /// A `<!-- … -->` comment body.
    Comment(String),
    /// The verbatim body of a `script` or `style` element.
    RawText(String),
}

impl HtmlNode {
    /// Creates an element node with no attributes.
    pub fn element(tag: &str, children: Vec<HtmlNode>) -> HtmlNode {
        HtmlNode::Element {
            tag: tag.to_ascii_lowercase(),
            attrs: Vec::new(),
            children,
        }
    }

    /// Creates an element node with attributes.
    pub fn element_with_attrs(
        tag: &str,
        attrs: Vec<(String, String)>,
        children: Vec<HtmlNode>,
    ) -> HtmlNode {
        HtmlNode::Element {
            tag: tag.to_ascii_lowercase(),
            attrs,
            children,
        }
    }

    /// Creates a text node.
    pub fn text(t: &str) -> HtmlNode {
        HtmlNode::Text(t.to_string())
    }

    /// Creates a synthetic document root holding `children`.
    pub fn document(children: Vec<HtmlNode>) -> HtmlNode {
        HtmlNode::Element {
            tag: ROOT_TAG.to_string(),
            attrs: Vec::new(),
            children,
        }
    }

    /// The element tag, or `None` for non-elements.
    pub fn tag(&self) -> Option<&str> {
        match self {
            HtmlNode::Element { tag, .. } => Some(tag),
            _ => None,
        }
    }

    /// True when this node is an element with the given (lowercase) tag.
    pub fn is(&self, tag: &str) -> bool {
        self.tag() == Some(tag)
    }

    /// The node's children (empty slice for non-elements).
    pub fn children(&self) -> &[HtmlNode] {
        match self {
            HtmlNode::Element { children, .. } => children,
            _ => &[],
        }
    }

    /// The value of the first attribute named `name` (lowercase), if present.
    pub fn attr(&self, name: &str) -> Option<&str> {
        match self {
            HtmlNode::Element { attrs, .. } => attrs
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    /// All attributes (empty slice for non-elements).
    pub fn attrs(&self) -> &[(String, String)] {
        match self {
            HtmlNode::Element { attrs, .. } => attrs,
            _ => &[],
        }
    }

    /// True when this is the synthetic document root.
    pub fn is_root(&self) -> bool {
        self.is(ROOT_TAG)
    }

    /// Number of element nodes in this subtree (including `self` when it is an
    /// element, excluding the synthetic root).
    pub fn element_count(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let HtmlNode::Element { tag, children, .. } = node {
                if tag != ROOT_TAG {
                    n += 1;
                }
                stack.extend(children.iter());
            }
        }
        n
    }

    /// Serializes the tree to normalized HTML.
    ///
    /// Text is entity-escaped, attribute values are double-quoted and escaped,
    /// every non-void element gets an explicit closing tag, and the synthetic
    /// root contributes only its children. For any tree produced by
    /// [`parse_html`], `parse_html(serialize(t)) == t` structurally.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        serialize_into(self, &mut out);
        out
    }

    /// Concatenated descendant text with runs of ASCII whitespace collapsed to
    /// single spaces and the ends trimmed. Comments and raw text are excluded.
    pub fn inner_text(&self) -> String {
        let mut out = String::new();
        let mut pending_space = false;
        collect_text(self, &mut out, &mut pending_space);
        out
    }

    /// Preorder traversal of this subtree (self first, document order).
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }
}

/// Iterator over a subtree in document (preorder) order.
pub struct Preorder<'a> {
    stack: Vec<&'a HtmlNode>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a HtmlNode;

    fn next(&mut self) -> Option<&'a HtmlNode> {
        let node = self.stack.pop()?;
        if let HtmlNode::Element { children, .. } = node {
            for child in children.iter().rev() {
                self.stack.push(child);
            }
        }
        Some(node)
    }
}

/// True when `tag` is a void element.
pub fn is_void(tag: &str) -> bool {
    VOID_ELEMENTS.contains(&tag)
}

/// True when `tag` captures its body verbatim.
pub fn is_raw_text(tag: &str) -> bool {
    RAW_TEXT_ELEMENTS.contains(&tag)
}

fn serialize_into(node: &HtmlNode, out: &mut String) {
    match node {
        HtmlNode::Element {
            tag,
            attrs,
            children,
        } => {
            if tag == ROOT_TAG {
                for child in children {
                    serialize_into(child, out);
                }
                return;
            }
            out.push('<');
            out.push_str(tag);
            for (name, value) in attrs {
                let _ = write!(out, " {}=\"{}\"", name, escape_attr(value));
            }
            out.push('>');
            if is_void(tag) {
                return;
            }
            for child in children {
                serialize_into(child, out);
            }
            let _ = write!(out, "</{}>", tag);
        }
        HtmlNode::Text(t) => out.push_str(&escape_text(t)),
        HtmlNode::Comment(t) => {
            let _ = write!(out, "<!--{}-->", t);
        }
        HtmlNode::RawText(t) => out.push_str(t),
    }
}

fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(ch),
        }
    }
    out
}

fn escape_attr(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for ch in value.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

fn is_ascii_ws(ch: char) -> bool {
    matches!(ch, ' ' | '\t' | '\n' | '\r' | '\x0C')
}

fn collect_text(node: &HtmlNode, out: &mut String, pending_space: &mut bool) {
    match node {
        HtmlNode::Text(t) => {
            for ch in t.chars() {
                if is_ascii_ws(ch) {
                    if !out.is_empty() {
                        *pending_space = true;
                    }
                } else {
                    if *pending_space {
                        out.push(' ');
                        *pending_space = false;
                    }
                    out.push(ch);
                }
            }
        }
        HtmlNode::Element { children, .. } => {
            for child in children {
                collect_text(child, out, pending_space);
            }
        }
        HtmlNode::Comment(_) | HtmlNode::RawText(_) => {}
    }
}

/// Collects the preorder paths of elements matching any selector in `sels`,
/// in document order.
pub(crate) fn collect_selector_paths(root: &HtmlNode, sels: &[Selector], out: &mut Vec<Vec<usize>>) {
    selector::collect_paths(root, sels, out);
}

/// Returns a copy of `root` with every subtree matching any selector in
/// `sels` removed. Text nodes made adjacent by a removal are merged.
pub(crate) fn collect_exclusion_free_copy(root: &HtmlNode, sels: &[Selector]) -> HtmlNode {
    let mut paths = Vec::new();
    selector::collect_paths(root, sels, &mut paths);
    let excluded: std::collections::HashSet<Vec<usize>> = paths.into_iter().collect();
    let mut path = Vec::new();
    rebuild_excluding(root, &mut path, &excluded)
}

fn rebuild_excluding(
    node: &HtmlNode,
    path: &mut Vec<usize>,
    excluded: &std::collections::HashSet<Vec<usize>>,
) -> HtmlNode {
    match node {
        HtmlNode::Element {
            tag,
            attrs,
            children,
        } => {
            let mut kept = Vec::with_capacity(children.len());
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                if !excluded.contains(path.as_slice()) {
                    push_merged(&mut kept, rebuild_excluding(child, path, excluded));
                }
                path.pop();
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

/// Appends `child` to `children`, merging adjacent text nodes so the merged
/// invariant holds for every constructed tree. Empty text nodes are dropped.
pub(crate) fn push_merged(children: &mut Vec<HtmlNode>, child: HtmlNode) {
    if let HtmlNode::Text(new_text) = &child {
        if new_text.is_empty() {
            return;
        }
        if let Some(HtmlNode::Text(existing)) = children.last_mut() {
            existing.push_str(new_text);
            return;
        }
    }
    children.push(child);
}
