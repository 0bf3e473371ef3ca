//! HTML-to-Markdown conversion with main-content extraction and
//! instruction-driven scoping.
//!
//! [`convert`] applies three passes in order: boilerplate removal, scope
//! selection (main-content scoring by default, selector-driven scoping on
//! demand), and rendering through a fixed GitHub-Flavored-Markdown element
//! mapping. Text content inside the scope is preserved verbatim modulo
//! whitespace collapsing; no Markdown metacharacters are escaped except `|`
//! inside table cells, so stripped output text equals the scope's text.

mod boilerplate;
mod main_content;
mod render;

pub use boilerplate::strip_boilerplate;
pub use main_content::score_main_content;
pub use render::normalize_markdown;

use serde::{Deserialize, Serialize};

use crate::html::{collect_exclusion_free_copy, HtmlNode, Selector};

/// How [`convert`] chooses the subtree(s) to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeMode {
    /// Render the single best-scoring content subtree (the default).
    MainContent,
    /// Render exactly the subtrees matched by the `include` selectors.
    Scoped,
}

/// Structured scoping rules for a conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionInstruction {
    pub mode: ScopeMode,
    /// Subtrees to render in `Scoped` mode (must be non-empty there).
    #[serde(default)]
    pub include: Vec<Selector>,
    /// Subtrees removed before scoping, in both modes.
    #[serde(default)]
    pub exclude: Vec<Selector>,
}

impl ExtractionInstruction {
    /// The default instruction: main-content extraction, no excludes.
    pub fn main_content() -> ExtractionInstruction {
        ExtractionInstruction {
            mode: ScopeMode::MainContent,
            include: Vec::new(),
            exclude: Vec::new(),
        }
    }

    /// A scoped instruction rendering only `include` matches.
    pub fn scoped(include: Vec<Selector>) -> ExtractionInstruction {
        ExtractionInstruction {
            mode: ScopeMode::Scoped,
            include,
            exclude: Vec::new(),
        }
    }
}

impl Default for ExtractionInstruction {
    fn default() -> Self {
        ExtractionInstruction::main_content()
    }
}

/// Counters describing a conversion's scope.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocStats {
    /// Elements inside the rendered scope.
    pub element_count: usize,
    /// Characters (Unicode scalar values) in the Markdown body.
    pub char_count: usize,
}

/// A rendered Markdown document.
///
/// The body has no trailing whitespace on any line, at most one blank line
/// between blocks, and ends with exactly one newline (or is empty).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkdownDoc {
    pub body: String,
    pub source_id: String,
    pub stats: DocStats,
}

impl MarkdownDoc {
    /// Returns the document tagged with a source identifier.
    pub fn with_source_id(mut self, source_id: &str) -> MarkdownDoc {
        self.source_id = source_id.to_string();
        self
    }
}

/// Conversion failure modes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    /// Scoped mode matched zero nodes: the instruction is unusable for this
    /// document (distinct from an empty page, which yields an empty body in
    /// MainContent mode).
    #[error("scoped instruction matched no nodes")]
    ScopeEmpty,
}

/// Converts an HTML tree to Markdown under `instr`.
///
/// Pure and deterministic: identical tree and instruction produce
/// byte-identical output. Content order follows document order.
pub fn convert(root: &HtmlNode, instr: &ExtractionInstruction) -> Result<MarkdownDoc, ConvertError> {
    let cleaned = strip_boilerplate(root);
    let cleaned = if instr.exclude.is_empty() {
        cleaned
    } else {
        collect_exclusion_free_copy(&cleaned, &instr.exclude)
    };
    let scopes: Vec<&HtmlNode> = match instr.mode {
        ScopeMode::MainContent => vec![score_main_content(&cleaned)],
        ScopeMode::Scoped => {
            let scopes = scoped_subtrees(&cleaned, &instr.include);
            if scopes.is_empty() {
                return Err(ConvertError::ScopeEmpty);
            }
            scopes
        }
    };
    let mut body = String::new();
    let mut element_count = 0;
    for scope in &scopes {
        let rendered = render::render_blocks(scope);
        if !rendered.is_empty() {
            if !body.is_empty() {
                body.push_str("\n\n");
            }
            body.push_str(&rendered);
        }
        element_count += scope.element_count();
    }
    let body = normalize_markdown(&body);
    let char_count = body.chars().count();
    Ok(MarkdownDoc {
        body,
        source_id: String::new(),
        stats: DocStats {
            element_count,
            char_count,
        },
    })
}

/// Resolves `include` selectors to disjoint subtrees in document order:
/// matches nested inside an earlier match are dropped so no content renders
/// twice.
fn scoped_subtrees<'a>(root: &'a HtmlNode, include: &[Selector]) -> Vec<&'a HtmlNode> {
    let mut paths = Vec::new();
    crate::html::collect_selector_paths(root, include, &mut paths);
    paths.sort();
    paths.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for path in paths {
        // In sorted order every path nested under a kept one follows it
        // immediately (possibly after other nested paths), so comparing with
        // the most recent kept path suffices to drop nested matches.
        if kept
            .last()
            .is_some_and(|prev| path.len() > prev.len() && path[..prev.len()] == prev[..])
        {
            continue;
        }
        kept.push(path);
    }
    kept.iter()
        .map(|path| {
            let mut node = root;
            for &idx in path {
                node = &node.children()[idx];
            }
            node
        })
        .collect()
}
