//! GFM rendering of a scoped HTML subtree.
//!
//! The element mapping is fixed: `h1`–`h6` → `#`×n, `p` → paragraph, `br` →
//! backslash line break, `hr` → `---`, `strong`/`b` → `**`, `em`/`i` → `*`,
//! `del`/`s` → `~~`, inline `code` → backtick-wrapped with longest-run
//! escaping, `pre` → fenced block (language from a `language-*` class),
//! `a` → `[text](href)` (plain text without an href), `img` → `![alt](src)`,
//! `ul`/`ol` → `- ` / `1. ` items with two-space nesting, `blockquote` → `> `
//! per line, `table` → GFM pipe table (header from `thead` or the first row,
//! row/col spans flattened by repeating the value). Text is emitted verbatim
//! (whitespace collapsed); the only escaping applied to document text is `|`
//! inside table cells, which keeps stripped Markdown equal to the scope's
//! text.

use crate::html::{HtmlNode, ROOT_TAG};

/// Tags rendered as blocks (everything else flows inline).
const BLOCK_TAGS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "caption",
    "center",
    "dd",
    "details",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hgroup",
    "hr",
    "html",
    "li",
    "main",
    "menu",
    "nav",
    "noscript",
    "ol",
    "p",
    "pre",
    "section",
    "summary",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "tr",
    "ul",
];

fn is_block(tag: &str) -> bool {
    tag == ROOT_TAG || BLOCK_TAGS.contains(&tag)
}

/// Renders a scope subtree to Markdown blocks joined by blank lines. The
/// result is not yet normalized; [`normalize_markdown`] finishes the job.
pub(crate) fn render_blocks(scope: &HtmlNode) -> String {
    let mut sink = Sink::default();
    flow_nodes(std::slice::from_ref(scope), &mut sink);
    sink.finish()
}

/// Enforces the Markdown body invariants: no trailing whitespace on any line,
/// at most one blank line between blocks, no leading/trailing blank lines,
/// and a single final newline (empty input stays empty). Idempotent.
pub fn normalize_markdown(input: &str) -> String {
    let mut lines: Vec<&str> = Vec::new();
    let mut blank_pending = false;
    for raw in input.lines() {
        let line = raw.trim_end();
        if line.is_empty() {
            if !lines.is_empty() {
                blank_pending = true;
            }
        } else {
            if blank_pending {
                lines.push("");
                blank_pending = false;
            }
            lines.push(line);
        }
    }
    if lines.is_empty() {
        return String::new();
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Block sink and flow
// ---------------------------------------------------------------------------

#[derive(Default)]
struct Sink {
    blocks: Vec<String>,
}

impl Sink {
    fn push_block(&mut self, block: String) {
        if !block.trim().is_empty() {
            self.blocks.push(block);
        }
    }

    fn finish(self) -> String {
        self.blocks.join("\n\n")
    }
}

/// Walks a child list: block elements are rendered as blocks, everything else
/// accumulates into paragraph runs.
fn flow_nodes(nodes: &[HtmlNode], sink: &mut Sink) {
    let mut buf = InlineBuf::new(true);
    for node in nodes {
        match node {
            HtmlNode::Element { tag, .. } if is_block(tag) => {
                flush_paragraph(&mut buf, sink);
                render_block(node, sink);
            }
            HtmlNode::Comment(_) | HtmlNode::RawText(_) => {}
            HtmlNode::Element { tag, .. } if tag == "script" || tag == "style" => {}
            other => render_inline(other, &mut buf),
        }
    }
    flush_paragraph(&mut buf, sink);
}

fn flush_paragraph(buf: &mut InlineBuf, sink: &mut Sink) {
    let text = buf.take();
    if !text.is_empty() {
        sink.push_block(text);
    }
}

fn render_block(node: &HtmlNode, sink: &mut Sink) {
    let tag = node.tag().unwrap_or(ROOT_TAG);
    match tag {
        "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => {
            let level = tag[1..].parse::<usize>().unwrap_or(1);
            let text = render_flattened(node.children());
            if !text.is_empty() {
                sink.push_block(format!("{} {}", "#".repeat(level), text));
            }
        }
        "hr" => sink.push_block("---".to_string()),
        "pre" => render_pre(node, sink),
        "blockquote" => {
            let mut sub = Sink::default();
            flow_nodes(node.children(), &mut sub);
            let inner = sub.finish();
            if !inner.is_empty() {
                let quoted: Vec<String> = inner
                    .lines()
                    .map(|l| {
                        if l.is_empty() {
                            ">".to_string()
                        } else {
                            format!("> {l}")
                        }
                    })
                    .collect();
                sink.push_block(quoted.join("\n"));
            }
        }
        "ul" | "ol" => {
            let lines = render_list(node, tag == "ol");
            if !lines.is_empty() {
                sink.push_block(lines.join("\n"));
            }
        }
        "table" => render_table(node, sink),
        "figcaption" => {
            let text = render_flattened(node.children());
            if !text.is_empty() {
                sink.push_block(format!("*{text}*"));
            }
        }
        // Paragraphs and generic containers: flow children; a paragraph is
        // simply a container whose inline children form one block.
        _ => flow_nodes(node.children(), sink),
    }
}

fn render_pre(node: &HtmlNode, sink: &mut Sink) {
    let mut content = String::new();
    verbatim_text(node, &mut content);
    let trimmed_lines: Vec<&str> = content.lines().map(|l| l.trim_end()).collect();
    let body = trimmed_lines.join("\n");
    let body = body.trim_matches('\n');
    if body.trim().is_empty() {
        return;
    }
    let lang = code_language(node).unwrap_or_default();
    let longest_run = longest_char_run(body, '`');
    let fence = "`".repeat((longest_run + 1).max(3));
    sink.push_block(format!("{fence}{lang}\n{body}\n{fence}"));
}

fn verbatim_text(node: &HtmlNode, out: &mut String) {
    match node {
        HtmlNode::Text(t) => out.push_str(t),
        HtmlNode::Element { children, .. } => {
            for child in children {
                verbatim_text(child, out);
            }
        }
        _ => {}
    }
}

/// Finds a `language-*` class on the element or its first `code` child.
fn code_language(node: &HtmlNode) -> Option<String> {
    let from_class = |n: &HtmlNode| -> Option<String> {
        n.attr("class")?
            .split_ascii_whitespace()
            .find_map(|tok| tok.strip_prefix("language-").map(str::to_string))
    };
    from_class(node).or_else(|| {
        node.children()
            .iter()
            .find(|c| c.is("code"))
            .and_then(from_class)
    })
}

fn longest_char_run(s: &str, target: char) -> usize {
    let mut best = 0;
    let mut run = 0;
    for ch in s.chars() {
        if ch == target {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Lists
// ---------------------------------------------------------------------------

/// Renders a list to indent-relative lines; callers (and outer list levels)
/// prepend two spaces per nesting level.
fn render_list(node: &HtmlNode, ordered: bool) -> Vec<String> {
    let marker = if ordered { "1. " } else { "- " };
    let mut lines = Vec::new();
    for child in node.children() {
        if child.is("li") {
            let mut sub = Sink::default();
            flow_nodes(child.children(), &mut sub);
            // Items are kept tight: blocks inside an item separate with a
            // single newline, not a blank line.
            let item_text = sub.blocks.join("\n");
            let mut first = true;
            for line in item_text.lines() {
                if first {
                    lines.push(format!("{marker}{line}"));
                    first = false;
                } else {
                    lines.push(format!("  {line}"));
                }
            }
            if first {
                // Empty item: keep the marker so list shape survives.
                lines.push(marker.trim_end().to_string());
            }
        } else if child.is("ul") || child.is("ol") {
            // A list directly inside a list (no wrapping li): nest it.
            for line in render_list(child, child.is("ol")) {
                lines.push(format!("  {line}"));
            }
        } else {
            // Stray non-item content inside a list: render it standalone so
            // no text is lost.
            let mut sub = Sink::default();
            flow_nodes(std::slice::from_ref(child), &mut sub);
            for line in sub.finish().lines() {
                lines.push(line.to_string());
            }
        }
    }
    lines
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

const MAX_SPAN: usize = 100;
const MAX_COLS: usize = 1024;

fn render_table(node: &HtmlNode, sink: &mut Sink) {
    if let Some(caption) = node.children().iter().find(|c| c.is("caption")) {
        let text = render_flattened(caption.children());
        if !text.is_empty() {
            sink.push_block(format!("*{text}*"));
        }
    }
    let mut rows: Vec<(bool, &HtmlNode)> = Vec::new();
    for child in node.children() {
        if child.is("tr") {
            rows.push((false, child));
        } else if child.is("thead") || child.is("tbody") || child.is("tfoot") {
            let in_head = child.is("thead");
            for tr in child.children().iter().filter(|c| c.is("tr")) {
                rows.push((in_head, tr));
            }
        }
    }
    if rows.is_empty() {
        return;
    }
    let header_idx = rows.iter().position(|(h, _)| *h).unwrap_or(0);

    // Expand spans into a rectangular grid of cell strings.
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut pending: std::collections::HashMap<usize, (String, usize)> = std::collections::HashMap::new();
    for (_, tr) in &rows {
        let mut out_row: Vec<String> = Vec::new();
        let mut col = 0usize;
        let mut cells = tr
            .children()
            .iter()
            .filter(|c| c.is("td") || c.is("th"))
            .peekable();
        loop {
            if let Some((value, remaining)) = pending.get_mut(&col) {
                out_row.push(value.clone());
                *remaining -= 1;
                if *remaining == 0 {
                    pending.remove(&col);
                }
                col += 1;
                continue;
            }
            let Some(cell) = cells.next() else { break };
            let text = render_cell(cell);
            let colspan = span_attr(cell, "colspan", MAX_SPAN);
            let rowspan = span_attr(cell, "rowspan", MAX_SPAN);
            for _ in 0..colspan {
                if col >= MAX_COLS {
                    break;
                }
                out_row.push(text.clone());
                if rowspan > 1 {
                    pending.insert(col, (text.clone(), rowspan - 1));
                }
                col += 1;
            }
        }
        grid.push(out_row);
    }
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    if cols == 0 {
        return;
    }
    for row in &mut grid {
        row.resize(cols, String::new());
    }
    let header = grid[header_idx].clone();
    let mut lines = Vec::with_capacity(grid.len() + 1);
    lines.push(format_row(&header));
    lines.push(format_row(&vec!["---".to_string(); cols]));
    for (i, row) in grid.iter().enumerate() {
        if i != header_idx {
            lines.push(format_row(row));
        }
    }
    sink.push_block(lines.join("\n"));
}

fn span_attr(cell: &HtmlNode, name: &str, cap: usize) -> usize {
    cell.attr(name)
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(1)
        .clamp(1, cap)
}

fn format_row(cells: &[String]) -> String {
    let mut line = String::from("|");
    for cell in cells {
        line.push(' ');
        line.push_str(cell);
        line.push_str(" |");
    }
    line
}

fn render_cell(cell: &HtmlNode) -> String {
    let text = render_flattened(cell.children());
    text.replace('|', "\\|")
}

// ---------------------------------------------------------------------------
// Inline rendering
// ---------------------------------------------------------------------------

/// Whitespace-collapsing inline accumulator. `pending_space` models the
/// "exactly one space between content runs" rule; spaces are never emitted at
/// the start of a line or before the buffer has content.
struct InlineBuf {
    out: String,
    pending_space: bool,
    saw_leading_ws: bool,
    allow_breaks: bool,
}

impl InlineBuf {
    fn new(allow_breaks: bool) -> InlineBuf {
        InlineBuf {
            out: String::new(),
            pending_space: false,
            saw_leading_ws: false,
            allow_breaks,
        }
    }

    fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    fn flush_space(&mut self) {
        if self.pending_space {
            if !self.out.is_empty() && !self.out.ends_with('\n') {
                self.out.push(' ');
            }
            self.pending_space = false;
        }
    }

    fn push_text(&mut self, text: &str) {
        for ch in text.chars() {
            if matches!(ch, ' ' | '\t' | '\n' | '\r' | '\x0C') {
                if self.out.is_empty() {
                    self.saw_leading_ws = true;
                } else {
                    self.pending_space = true;
                }
            } else {
                self.flush_space();
                self.out.push(ch);
            }
        }
    }

    /// Pushes pre-rendered markup (markers, links) after any pending space.
    fn push_atom(&mut self, atom: &str) {
        if atom.is_empty() {
            return;
        }
        self.flush_space();
        self.out.push_str(atom);
    }

    /// Appends directly with no space handling (closing markers).
    fn push_raw(&mut self, raw: &str) {
        self.out.push_str(raw);
    }

    fn push_break(&mut self) {
        if self.out.is_empty() {
            return;
        }
        if self.allow_breaks {
            self.flush_space();
            self.out.push_str("\\\n");
        } else {
            self.pending_space = true;
        }
    }

    fn take(&mut self) -> String {
        let mut text = std::mem::take(&mut self.out);
        self.pending_space = false;
        self.saw_leading_ws = false;
        while text.ends_with("\\\n") {
            text.truncate(text.len() - 2);
        }
        text.trim_end().to_string()
    }
}

fn render_inline(node: &HtmlNode, buf: &mut InlineBuf) {
    match node {
        HtmlNode::Text(t) => buf.push_text(t),
        HtmlNode::Comment(_) | HtmlNode::RawText(_) => {}
        HtmlNode::Element { tag, children, .. } => match tag.as_str() {
            "br" => buf.push_break(),
            "b" | "strong" => wrap_inline(children, "**", "**", buf),
            "i" | "em" => wrap_inline(children, "*", "*", buf),
            "del" | "s" | "strike" => wrap_inline(children, "~~", "~~", buf),
            "code" => render_code_span(node, buf),
            "a" => render_link(node, buf),
            "img" => render_image(node, buf),
            "script" | "style" => {}
            t if is_block(t) => {
                // A block element in inline context (heading/cell content or
                // irregular nesting): flatten transparently with spacing.
                if !buf.is_empty() {
                    buf.pending_space = true;
                }
                for child in children {
                    render_inline(child, buf);
                }
                buf.pending_space = true;
            }
            _ => {
                for child in children {
                    render_inline(child, buf);
                }
            }
        },
    }
}

/// Renders children into a sub-buffer and splices it between markers,
/// moving boundary whitespace outside the markers.
fn wrap_inline(children: &[HtmlNode], open: &str, close: &str, buf: &mut InlineBuf) {
    let mut inner = InlineBuf::new(false);
    for child in children {
        render_inline(child, &mut inner);
    }
    if inner.is_empty() {
        if inner.saw_leading_ws && !buf.is_empty() {
            buf.pending_space = true;
        }
        return;
    }
    if inner.saw_leading_ws && !buf.is_empty() {
        buf.pending_space = true;
    }
    let trailing_ws = inner.pending_space;
    buf.push_atom(open);
    buf.push_raw(&inner.out);
    buf.push_raw(close);
    if trailing_ws {
        buf.pending_space = true;
    }
}

fn render_code_span(node: &HtmlNode, buf: &mut InlineBuf) {
    let content = node.inner_text();
    if content.is_empty() {
        // Whitespace-only code spans still separate words.
        if !node.children().is_empty() && !buf.is_empty() {
            buf.pending_space = true;
        }
        return;
    }
    let run = longest_char_run(&content, '`');
    let ticks = "`".repeat(run + 1);
    let pad = if content.starts_with('`') || content.ends_with('`') {
        " "
    } else {
        ""
    };
    buf.push_atom(&format!("{ticks}{pad}{content}{pad}{ticks}"));
}

fn render_link(node: &HtmlNode, buf: &mut InlineBuf) {
    let Some(href) = node.attr("href") else {
        for child in node.children() {
            render_inline(child, buf);
        }
        return;
    };
    let mut inner = InlineBuf::new(false);
    for child in node.children() {
        render_inline(child, &mut inner);
    }
    if inner.is_empty() {
        if inner.saw_leading_ws && !buf.is_empty() {
            buf.pending_space = true;
        }
        return;
    }
    if inner.saw_leading_ws && !buf.is_empty() {
        buf.pending_space = true;
    }
    let trailing_ws = inner.pending_space;
    buf.push_atom(&format!("[{}]({})", inner.out, format_url(href)));
    if trailing_ws {
        buf.pending_space = true;
    }
}

fn render_image(node: &HtmlNode, buf: &mut InlineBuf) {
    let Some(src) = node.attr("src") else { return };
    let mut alt_buf = InlineBuf::new(false);
    alt_buf.push_text(node.attr("alt").unwrap_or(""));
    buf.push_atom(&format!("![{}]({})", alt_buf.out, format_url(src)));
}

/// Angle-bracket-wraps URLs that would break `(...)` destinations.
fn format_url(url: &str) -> String {
    if url.contains([' ', '(', ')']) {
        format!("<{url}>")
    } else {
        url.to_string()
    }
}

/// Flattens arbitrary content to a single collapsed line (headings, cells).
fn render_flattened(children: &[HtmlNode]) -> String {
    let mut buf = InlineBuf::new(false);
    for child in children {
        render_inline(child, &mut buf);
    }
    buf.take()
}
