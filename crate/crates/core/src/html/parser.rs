//! Lenient tag-soup tokenizer and tree builder.
//!
//! Parsing never fails: unknown tags become generic elements, unclosed tags
//! are implicitly closed at the nearest enclosing block boundary, stray close
//! tags are dropped, and `script`/`style` bodies are captured verbatim. The
//! implicit-close table is fixed (`p`, `li`, `td`/`th`, `tr`, `option`) rather
//! than implementing the full HTML5 tree-construction algorithm; the goal is
//! robustness on messy input, not browser conformance.
//!
//! The recovery rules are chosen so that serializing any parsed tree and
//! re-parsing it reproduces the tree structurally: implicit closes fire only
//! by inspecting the open-element stack top, so the explicit markup emitted by
//! the serializer never re-triggers them, and comment/raw-text bodies can
//! never contain their own terminator sequence.

use super::{is_raw_text, is_void, push_merged, HtmlNode, MAX_DEPTH, ROOT_TAG};

/// Parses a byte sequence into a lenient DOM tree. Never fails.
///
/// The encoding is chosen in this order: byte-order mark, `encoding_hint`
/// (e.g. from an HTTP header), a `charset` declaration within the first 1024
/// bytes, then UTF-8. Undecodable bytes become U+FFFD.
pub fn parse_html(input: &[u8], encoding_hint: Option<&str>) -> HtmlNode {
    parse_str(&decode_bytes(input, encoding_hint))
}

/// Parses an already-decoded string into a lenient DOM tree. Never fails.
pub fn parse_str(input: &str) -> HtmlNode {
    Builder::new().parse(input)
}

struct Frame {
    tag: String,
    attrs: Vec<(String, String)>,
    children: Vec<HtmlNode>,
}

struct Builder {
    stack: Vec<Frame>,
}

/// Tags whose open implicitly closes an open `p`. This is the HTML5 list of
/// elements that terminate a paragraph, extended with the table-row/cell tags
/// so that a `p` left open inside a cell cannot swallow the rest of the table.
const P_CLOSERS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "center",
    "dd",
    "details",
    "dialog",
    "dir",
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
    "li",
    "main",
    "menu",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "td",
    "th",
    "tr",
    "ul",
];

/// Whether an open `<new_tag>` implicitly closes the innermost open
/// `stack_top` element. Only the stack top is ever consulted, which keeps the
/// rule self-consistent under re-parsing of serialized output.
fn closes_on_open(stack_top: &str, new_tag: &str) -> bool {
    match stack_top {
        "p" => P_CLOSERS.contains(&new_tag),
        "li" => new_tag == "li",
        "td" | "th" => matches!(new_tag, "td" | "th" | "tr"),
        "tr" => new_tag == "tr",
        "option" => matches!(new_tag, "option" | "optgroup"),
        _ => false,
    }
}

impl Builder {
    fn new() -> Builder {
        Builder {
            stack: vec![Frame {
                tag: ROOT_TAG.to_string(),
                attrs: Vec::new(),
                children: Vec::new(),
            }],
        }
    }

    fn parse(mut self, input: &str) -> HtmlNode {
        let bytes = input.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            match find_byte(bytes, pos, b'<') {
                None => {
                    self.push_text(&input[pos..]);
                    break;
                }
                Some(lt) => {
                    if lt > pos {
                        self.push_text(&input[pos..lt]);
                    }
                    pos = self.handle_markup(input, lt);
                }
            }
        }
        self.finish()
    }

    /// Handles the markup construct starting at the `<` at byte `lt`;
    /// returns the position to resume scanning from.
    fn handle_markup(&mut self, input: &str, lt: usize) -> usize {
        let bytes = input.as_bytes();
        let next = lt + 1;
        if next >= bytes.len() {
            self.push_text("<");
            return bytes.len();
        }
        match bytes[next] {
            b'!' => {
                if input[next..].starts_with("!--") {
                    self.consume_comment(input, next + 3)
                } else {
                    skip_bogus(bytes, next + 1)
                }
            }
            b'?' => skip_bogus(bytes, next + 1),
            b'/' => {
                let name_start = next + 1;
                if name_start >= bytes.len() {
                    self.push_text("</");
                    return bytes.len();
                }
                if bytes[name_start].is_ascii_alphabetic() {
                    self.consume_close_tag(input, name_start)
                } else {
                    skip_bogus(bytes, name_start)
                }
            }
            b if b.is_ascii_alphabetic() => self.consume_open_tag(input, next),
            _ => {
                self.push_text("<");
                next
            }
        }
    }

    fn consume_comment(&mut self, input: &str, body_start: usize) -> usize {
        match input[body_start..].find("-->") {
            Some(rel) => {
                let body = &input[body_start..body_start + rel];
                self.attach(HtmlNode::Comment(body.to_string()));
                body_start + rel + 3
            }
            None => {
                self.attach(HtmlNode::Comment(input[body_start..].to_string()));
                input.len()
            }
        }
    }

    fn consume_close_tag(&mut self, input: &str, name_start: usize) -> usize {
        let bytes = input.as_bytes();
        let name_end = scan_name_end(bytes, name_start);
        let name = input[name_start..name_end].to_ascii_lowercase();
        let resume = match find_byte(bytes, name_end, b'>') {
            Some(gt) => gt + 1,
            None => bytes.len(),
        };
        // Close the nearest matching open element, implicitly closing
        // everything opened inside it; a close with no matching open is
        // dropped. The synthetic root is never closable.
        if let Some(depth) = self
            .stack
            .iter()
            .skip(1)
            .rposition(|f| f.tag == name)
            .map(|i| i + 1)
        {
            while self.stack.len() > depth {
                self.pop_frame();
            }
        }
        resume
    }

    fn consume_open_tag(&mut self, input: &str, name_start: usize) -> usize {
        let bytes = input.as_bytes();
        let name_end = scan_name_end(bytes, name_start);
        let tag = input[name_start..name_end].to_ascii_lowercase();
        let mut attrs: Vec<(String, String)> = Vec::new();
        let mut pos = name_end;
        loop {
            while pos < bytes.len() && (is_ws(bytes[pos]) || bytes[pos] == b'/') {
                pos += 1;
            }
            if pos >= bytes.len() {
                // Tag truncated by end of input: drop it entirely.
                return bytes.len();
            }
            if bytes[pos] == b'>' {
                pos += 1;
                break;
            }
            let attr_start = pos;
            while pos < bytes.len() && !is_ws(bytes[pos]) && !matches!(bytes[pos], b'/' | b'>' | b'=')
            {
                pos += 1;
            }
            if pos == attr_start {
                // A stray '=' with no attribute name: skip the character.
                pos += 1;
                continue;
            }
            let name = input[attr_start..pos].to_ascii_lowercase();
            while pos < bytes.len() && is_ws(bytes[pos]) {
                pos += 1;
            }
            let mut value = String::new();
            if pos < bytes.len() && bytes[pos] == b'=' {
                pos += 1;
                while pos < bytes.len() && is_ws(bytes[pos]) {
                    pos += 1;
                }
                if pos < bytes.len() && (bytes[pos] == b'"' || bytes[pos] == b'\'') {
                    let quote = bytes[pos];
                    pos += 1;
                    match find_byte(bytes, pos, quote) {
                        Some(end) => {
                            value = decode_entities(&input[pos..end]);
                            pos = end + 1;
                        }
                        None => return bytes.len(), // unterminated value: drop tag
                    }
                } else {
                    let vstart = pos;
                    while pos < bytes.len() && !is_ws(bytes[pos]) && bytes[pos] != b'>' {
                        pos += 1;
                    }
                    value = decode_entities(&input[vstart..pos]);
                }
            }
            if !attrs.iter().any(|(n, _)| *n == name) {
                attrs.push((name, value));
            }
        }
        self.open_element(tag, attrs, input, pos)
    }

    /// Dispatches a completed open tag; returns the resume position (which
    /// advances past the body and close tag for raw-text elements).
    fn open_element(
        &mut self,
        tag: String,
        attrs: Vec<(String, String)>,
        input: &str,
        body_start: usize,
    ) -> usize {
        while self
            .stack
            .last()
            .is_some_and(|top| closes_on_open(&top.tag, &tag))
        {
            self.pop_frame();
        }
        if is_raw_text(&tag) {
            let (body, resume) = scan_raw_text(input, body_start, &tag);
            if self.stack.len() < MAX_DEPTH {
                let mut children = Vec::new();
                if !body.is_empty() {
                    children.push(HtmlNode::RawText(body.to_string()));
                }
                self.attach(HtmlNode::Element {
                    tag,
                    attrs,
                    children,
                });
            }
            return resume;
        }
        if is_void(&tag) {
            self.attach(HtmlNode::Element {
                tag,
                attrs,
                children: Vec::new(),
            });
            return body_start;
        }
        if self.stack.len() < MAX_DEPTH {
            self.stack.push(Frame {
                tag,
                attrs,
                children: Vec::new(),
            });
        }
        body_start
    }

    fn push_text(&mut self, raw: &str) {
        let decoded = decode_entities(raw);
        self.attach(HtmlNode::Text(decoded));
    }

    fn attach(&mut self, node: HtmlNode) {
        let top = self.stack.last_mut().expect("stack is never empty");
        push_merged(&mut top.children, node);
    }

    fn pop_frame(&mut self) {
        debug_assert!(self.stack.len() > 1);
        let frame = self.stack.pop().expect("pop_frame on root");
        let node = HtmlNode::Element {
            tag: frame.tag,
            attrs: frame.attrs,
            children: frame.children,
        };
        self.attach(node);
    }

    fn finish(mut self) -> HtmlNode {
        while self.stack.len() > 1 {
            self.pop_frame();
        }
        let root = self.stack.pop().expect("root frame");
        HtmlNode::Element {
            tag: root.tag,
            attrs: root.attrs,
            children: root.children,
        }
    }
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | b'\x0C')
}

fn find_byte(bytes: &[u8], from: usize, needle: u8) -> Option<usize> {
    bytes[from..].iter().position(|&b| b == needle).map(|i| from + i)
}

fn scan_name_end(bytes: &[u8], start: usize) -> usize {
    let mut pos = start;
    while pos < bytes.len() && !is_ws(bytes[pos]) && !matches!(bytes[pos], b'/' | b'>') {
        pos += 1;
    }
    pos
}

/// Skips a bogus construct (`<!...>`, `<?...>`, `</3...>`) through its `>`.
fn skip_bogus(bytes: &[u8], from: usize) -> usize {
    match find_byte(bytes, from, b'>') {
        Some(gt) => gt + 1,
        None => bytes.len(),
    }
}

/// Scans the body of a raw-text element: everything up to the first
/// case-insensitive `</tag` that is followed by whitespace, `/`, `>`, or end
/// of input-with-`>` — i.e. a real close tag. Returns the body slice and the
/// position after the close tag (end of input when unterminated).
fn scan_raw_text<'a>(input: &'a str, body_start: usize, tag: &str) -> (&'a str, usize) {
    let bytes = input.as_bytes();
    let tag_bytes = tag.as_bytes();
    let mut i = body_start;
    while i + 2 + tag_bytes.len() <= bytes.len() {
        if bytes[i] == b'<' && bytes[i + 1] == b'/' {
            let name_end = i + 2 + tag_bytes.len();
            let candidate = &bytes[i + 2..name_end];
            if candidate.eq_ignore_ascii_case(tag_bytes)
                && name_end < bytes.len()
                && (is_ws(bytes[name_end]) || matches!(bytes[name_end], b'/' | b'>'))
            {
                let resume = match find_byte(bytes, name_end, b'>') {
                    Some(gt) => gt + 1,
                    None => bytes.len(),
                };
                return (&input[body_start..i], resume);
            }
        }
        i += 1;
    }
    (&input[body_start..], bytes.len())
}

/// Decodes the supported entity set: `&amp;` `&lt;` `&gt;` `&quot;` `&apos;`
/// `&nbsp;` plus numeric references (`&#215;`, `&#xD7;`). Unknown or
/// malformed references pass through literally.
pub(crate) fn decode_entities(input: &str) -> String {
    if !input.contains('&') {
        return input.to_string();
    }
    let mut out = String::with_capacity(input.len());
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'&' {
            let start = i;
            while i < bytes.len() && bytes[i] != b'&' {
                i += 1;
            }
            out.push_str(&input[start..i]);
            continue;
        }
        match parse_entity(&input[i..]) {
            Some((ch, len)) => {
                out.push(ch);
                i += len;
            }
            None => {
                out.push('&');
                i += 1;
            }
        }
    }
    out
}

/// Parses one entity at the start of `s` (which begins with `&`); returns the
/// decoded char and the byte length consumed.
fn parse_entity(s: &str) -> Option<(char, usize)> {
    let rest = &s[1..];
    if let Some(numeric) = rest.strip_prefix('#') {
        let (digits, radix) = match numeric.strip_prefix(['x', 'X']) {
            Some(hex) => (hex, 16),
            None => (numeric, 10),
        };
        let end = digits
            .char_indices()
            .take_while(|(_, c)| c.is_digit(radix))
            .count();
        if end == 0 || end > 7 || !digits[end..].starts_with(';') {
            return None;
        }
        let code = u32::from_str_radix(&digits[..end], radix).ok()?;
        let ch = match char::from_u32(code) {
            Some('\0') | None => '\u{FFFD}',
            Some(c) => c,
        };
        let prefix = s.len() - digits.len(); // "&#" or "&#x"
        return Some((ch, prefix + end + 1));
    }
    let semi = rest.find(';')?;
    if semi == 0 || semi > 8 {
        return None;
    }
    let name = &rest[..semi];
    let ch = match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{A0}',
        _ => return None,
    };
    Some((ch, 1 + semi + 1))
}

// ---------------------------------------------------------------------------
// Byte decoding
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Debug)]
enum Encoding {
    Utf8,
    Latin1,
    Cp1252,
    Utf16Le,
    Utf16Be,
}

/// Decodes raw bytes to a string: BOM, then `hint`, then a `charset`
/// declaration in the first 1024 bytes, then UTF-8. Undecodable sequences
/// become U+FFFD. Recognized labels: UTF-8, US-ASCII, ISO-8859-1/Latin-1,
/// Windows-1252, UTF-16 (LE/BE).
pub fn decode_bytes(input: &[u8], hint: Option<&str>) -> String {
    if input.starts_with(&[0xEF, 0xBB, 0xBF]) {
        return decode_with(&input[3..], Encoding::Utf8);
    }
    if input.starts_with(&[0xFF, 0xFE]) {
        return decode_with(&input[2..], Encoding::Utf16Le);
    }
    if input.starts_with(&[0xFE, 0xFF]) {
        return decode_with(&input[2..], Encoding::Utf16Be);
    }
    if let Some(enc) = hint.and_then(encoding_from_label) {
        return decode_with(input, enc);
    }
    if let Some(enc) = sniff_meta_charset(input) {
        return decode_with(input, enc);
    }
    decode_with(input, Encoding::Utf8)
}

fn encoding_from_label(label: &str) -> Option<Encoding> {
    match label.trim().to_ascii_lowercase().as_str() {
        "utf-8" | "utf8" | "us-ascii" | "ascii" => Some(Encoding::Utf8),
        "iso-8859-1" | "iso8859-1" | "latin1" | "latin-1" | "l1" => Some(Encoding::Latin1),
        "windows-1252" | "cp1252" | "x-cp1252" => Some(Encoding::Cp1252),
        "utf-16" | "utf16" | "utf-16le" => Some(Encoding::Utf16Le),
        "utf-16be" => Some(Encoding::Utf16Be),
        _ => None,
    }
}

/// Looks for `charset = <label>` (attribute or `content=` form) in the first
/// 1024 bytes, ASCII-case-insensitively.
fn sniff_meta_charset(input: &[u8]) -> Option<Encoding> {
    let window = &input[..input.len().min(1024)];
    let needle = b"charset";
    let mut i = 0;
    while i + needle.len() <= window.len() {
        if window[i..i + needle.len()].eq_ignore_ascii_case(needle) {
            let mut j = i + needle.len();
            while j < window.len() && is_ws(window[j]) {
                j += 1;
            }
            if j < window.len() && window[j] == b'=' {
                j += 1;
                while j < window.len() && is_ws(window[j]) {
                    j += 1;
                }
                if j < window.len() && (window[j] == b'"' || window[j] == b'\'') {
                    j += 1;
                }
                let start = j;
                while j < window.len()
                    && !is_ws(window[j])
                    && !matches!(window[j], b'"' | b'\'' | b';' | b'>' | b'/')
                {
                    j += 1;
                }
                if let Ok(label) = std::str::from_utf8(&window[start..j]) {
                    if let Some(enc) = encoding_from_label(label) {
                        return Some(enc);
                    }
                }
            }
        }
        i += 1;
    }
    None
}

fn decode_with(input: &[u8], encoding: Encoding) -> String {
    match encoding {
        Encoding::Utf8 => String::from_utf8_lossy(input).into_owned(),
        Encoding::Latin1 => input.iter().map(|&b| b as char).collect(),
        Encoding::Cp1252 => input.iter().map(|&b| cp1252_char(b)).collect(),
        Encoding::Utf16Le => decode_utf16(input, u16::from_le_bytes),
        Encoding::Utf16Be => decode_utf16(input, u16::from_be_bytes),
    }
}

fn decode_utf16(input: &[u8], combine: fn([u8; 2]) -> u16) -> String {
    let mut units: Vec<u16> = input
        .chunks_exact(2)
        .map(|pair| combine([pair[0], pair[1]]))
        .collect();
    if input.len() % 2 == 1 {
        units.push(0xFFFD);
    }
    String::from_utf16_lossy(&units)
}

/// Windows-1252: the 0x80–0x9F range maps to printable characters; the five
/// unassigned slots pass through as C1 controls (WHATWG behavior).
fn cp1252_char(b: u8) -> char {
    const HIGH: [char; 32] = [
        '\u{20AC}', '\u{0081}', '\u{201A}', '\u{0192}', '\u{201E}', '\u{2026}', '\u{2020}',
        '\u{2021}', '\u{02C6}', '\u{2030}', '\u{0160}', '\u{2039}', '\u{0152}', '\u{008D}',
        '\u{017D}', '\u{008F}', '\u{0090}', '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}',
        '\u{2022}', '\u{2013}', '\u{2014}', '\u{02DC}', '\u{2122}', '\u{0161}', '\u{203A}',
        '\u{0153}', '\u{009D}', '\u{017E}', '\u{0178}',
    ];
    match b {
        0x80..=0x9F => HIGH[(b - 0x80) as usize],
        _ => b as char,
    }
}
