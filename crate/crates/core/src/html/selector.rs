//! Minimal CSS-like selectors: compound steps joined by the descendant
//! combinator only.
//!
//! A step is any combination of `tag`, `#id`, `.class`, and `[attr=value]`
//! filters (at least one per step). Matching is case-insensitive on tags and
//! case-sensitive on ids, classes, and attribute values. There are no child
//! or sibling combinators and no pseudo-classes.

use std::fmt;

use super::HtmlNode;

/// A parsed selector: one or more steps related by descendant-at-any-depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    steps: Vec<SelectorStep>,
}

/// One compound step of a selector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectorStep {
    /// Lowercase tag filter.
    pub tag: Option<String>,
    /// `#id` filter (case-sensitive).
    pub id: Option<String>,
    /// `.class` filters; all must be present on the element.
    pub classes: Vec<String>,
    /// `[name=value]` filters; attribute names are lowercase.
    pub attrs: Vec<(String, String)>,
}

/// Error produced when selector text is malformed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid selector `{selector}`: {message}")]
pub struct SelectorParseError {
    pub selector: String,
    pub message: String,
}

impl Selector {
    /// Parses selector text such as `div.article p`, `#main`, or
    /// `a[href=/x]`.
    pub fn parse(text: &str) -> Result<Selector, SelectorParseError> {
        let err = |message: &str| SelectorParseError {
            selector: text.to_string(),
            message: message.to_string(),
        };
        let mut steps = Vec::new();
        for raw_step in text.split_whitespace() {
            steps.push(parse_step(raw_step).map_err(|m| err(&m))?);
        }
        if steps.is_empty() {
            return Err(err("selector is empty"));
        }
        Ok(Selector { steps })
    }

    /// The parsed steps, outermost first.
    pub fn steps(&self) -> &[SelectorStep] {
        &self.steps
    }

    /// Returns all elements under `root` matching this selector, in document
    /// order. `root` itself is never returned for the synthetic document root.
    pub fn select<'a>(&self, root: &'a HtmlNode) -> Vec<&'a HtmlNode> {
        let mut out = Vec::new();
        let active = vec![false; self.steps.len() + 1];
        let mut seed = active.clone();
        seed[0] = true;
        select_walk(root, &seed, &self.steps, &mut |node| out.push(node));
        out
    }

    /// Returns the preorder paths (child-index chains from `root`) of all
    /// matching elements, in document order.
    pub fn select_paths(&self, root: &HtmlNode) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        collect_paths(root, std::slice::from_ref(self), &mut out);
        out
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for step in &self.steps {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if let Some(tag) = &step.tag {
                write!(f, "{tag}")?;
            }
            if let Some(id) = &step.id {
                write!(f, "#{id}")?;
            }
            for class in &step.classes {
                write!(f, ".{class}")?;
            }
            for (name, value) in &step.attrs {
                write!(f, "[{name}={value}]")?;
            }
        }
        Ok(())
    }
}

/// Selectors serialize as their source string so they can live directly in
/// JSON/TOML instruction files.
impl serde::Serialize for Selector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Selector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Selector::parse(&raw).map_err(serde::de::Error::custom)
    }
}

fn parse_step(raw: &str) -> Result<SelectorStep, String> {
    let mut step = SelectorStep::default();
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    let ident_end = |chars: &[char], mut j: usize| {
        while j < chars.len() && !matches!(chars[j], '#' | '.' | '[') {
            j += 1;
        }
        j
    };
    if i < chars.len() && !matches!(chars[i], '#' | '.' | '[') {
        let end = ident_end(&chars, i);
        let tag: String = chars[i..end].iter().collect();
        if tag.is_empty() {
            return Err("empty tag name".into());
        }
        step.tag = Some(tag.to_ascii_lowercase());
        i = end;
    }
    while i < chars.len() {
        match chars[i] {
            '#' => {
                let end = ident_end(&chars, i + 1);
                let id: String = chars[i + 1..end].iter().collect();
                if id.is_empty() {
                    return Err("empty id filter".into());
                }
                if step.id.replace(id).is_some() {
                    return Err("duplicate id filter".into());
                }
                i = end;
            }
            '.' => {
                let end = ident_end(&chars, i + 1);
                let class: String = chars[i + 1..end].iter().collect();
                if class.is_empty() {
                    return Err("empty class filter".into());
                }
                step.classes.push(class);
                i = end;
            }
            '[' => {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ']')
                    .ok_or("unterminated attribute filter")?
                    + i;
                let body: String = chars[i + 1..close].iter().collect();
                let (name, value) = body
                    .split_once('=')
                    .ok_or("attribute filter requires name=value")?;
                let name = name.trim();
                if name.is_empty() {
                    return Err("empty attribute name".into());
                }
                let value = value.trim().trim_matches('"').trim_matches('\'');
                step.attrs
                    .push((name.to_ascii_lowercase(), value.to_string()));
                i = close + 1;
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    if step.tag.is_none() && step.id.is_none() && step.classes.is_empty() && step.attrs.is_empty() {
        return Err("step has no filters".into());
    }
    Ok(step)
}

/// True when `node` is an element satisfying every filter of `step`.
pub fn step_matches(step: &SelectorStep, node: &HtmlNode) -> bool {
    let HtmlNode::Element { tag, .. } = node else {
        return false;
    };
    if tag == super::ROOT_TAG {
        return false;
    }
    if let Some(want) = &step.tag {
        if tag != want {
            return false;
        }
    }
    if let Some(want) = &step.id {
        if node.attr("id") != Some(want.as_str()) {
            return false;
        }
    }
    if !step.classes.is_empty() {
        let Some(class_attr) = node.attr("class") else {
            return false;
        };
        let present: Vec<&str> = class_attr.split_ascii_whitespace().collect();
        if !step.classes.iter().all(|c| present.contains(&c.as_str())) {
            return false;
        }
    }
    for (name, value) in &step.attrs {
        if node.attr(name) != Some(value.as_str()) {
            return false;
        }
    }
    true
}

/// Preorder walk carrying the set of matched step prefixes along the ancestor
/// path: `active[k]` means steps `0..k` have matched on this path, so the
/// node is a hit when extending a full prefix with the last step.
fn select_walk<'a>(
    node: &'a HtmlNode,
    active: &[bool],
    steps: &[SelectorStep],
    on_match: &mut impl FnMut(&'a HtmlNode),
) {
    let mut next = active.to_vec();
    if matches!(node, HtmlNode::Element { .. }) {
        let mut hit = false;
        for k in 0..steps.len() {
            if active[k] && step_matches(&steps[k], node) {
                next[k + 1] = true;
                if k + 1 == steps.len() {
                    hit = true;
                }
            }
        }
        if hit {
            on_match(node);
        }
    }
    for child in node.children() {
        select_walk(child, &next, steps, on_match);
    }
}

/// Collects preorder paths of elements matched by ANY selector in `sels`.
/// Paths are emitted in document order without duplicates.
pub(crate) fn collect_paths(root: &HtmlNode, sels: &[Selector], out: &mut Vec<Vec<usize>>) {
    struct Walker<'s> {
        states: Vec<Vec<bool>>,
        sels: &'s [Selector],
    }
    impl<'s> Walker<'s> {
        fn walk(&mut self, node: &HtmlNode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let mut next_states = Vec::with_capacity(self.states.len());
            let mut hit = false;
            for (sel, active) in self.sels.iter().zip(&self.states) {
                let steps = sel.steps();
                let mut next = active.clone();
                if matches!(node, HtmlNode::Element { .. }) {
                    for k in 0..steps.len() {
                        if active[k] && step_matches(&steps[k], node) {
                            next[k + 1] = true;
                            if k + 1 == steps.len() {
                                hit = true;
                            }
                        }
                    }
                }
                next_states.push(next);
            }
            if hit {
                out.push(path.clone());
            }
            let saved = std::mem::replace(&mut self.states, next_states);
            for (i, child) in node.children().iter().enumerate() {
                path.push(i);
                self.walk(child, path, out);
                path.pop();
            }
            self.states = saved;
        }
    }
    let mut walker = Walker {
        states: sels
            .iter()
            .map(|s| {
                let mut v = vec![false; s.steps().len() + 1];
                v[0] = true;
                v
            })
            .collect(),
        sels,
    };
    walker.walk(root, &mut Vec::new(), out);
}

/// Convenience wrapper: parse-free selection with a pre-built [`Selector`].
pub fn select<'a>(root: &'a HtmlNode, sel: &Selector) -> Vec<&'a HtmlNode> {
    sel.select(root)
}
