//! Prompt templates for the three pipeline stages.
//!
//! Templates are plain text files with two sections introduced by `[system]`
//! and `[user]` header lines. Placeholders of the form `{{name}}` are
//! substituted at render time; the pipeline supplies `html`, `schema`,
//! `draft`, `refined`, and `instruction` as appropriate for the stage.
//! Built-in defaults exist for every (task, stage) pair, so template files
//! are only needed to override them.

use sha2::{Digest, Sha256};

use super::{PipelineError, Task};

/// Pipeline stage selector for templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Draft,
    Refine,
    Critique,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Draft => write!(f, "draft"),
            Stage::Refine => write!(f, "refine"),
            Stage::Critique => write!(f, "critique"),
        }
    }
}

/// A two-part prompt: system text and user text with `{{placeholders}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    pub system: String,
    pub user: String,
}

/// Marker that separates the instruction part of a user prompt from the
/// document payload. [`instruction_of`] strips everything from this marker
/// on, so assembled datasets never duplicate the HTML inside the instruction
/// field.
pub(crate) const DOCUMENT_MARKER: &str = "\n\nDocument:\n";

impl PromptTemplate {
    /// Parses the `[system]` / `[user]` file format. Both sections are
    /// required, in that order; text before `[system]` is rejected.
    pub fn parse(text: &str) -> Result<PromptTemplate, PipelineError> {
        let mut system: Option<Vec<&str>> = None;
        let mut user: Option<Vec<&str>> = None;
        let mut current: Option<&mut Vec<&str>> = None;
        for (i, line) in text.lines().enumerate() {
            match line.trim_end() {
                "[system]" => {
                    if system.is_some() {
                        return Err(PipelineError::TemplateError(format!(
                            "duplicate [system] section at line {}",
                            i + 1
                        )));
                    }
                    system = Some(Vec::new());
                    current = system.as_mut();
                }
                "[user]" => {
                    if user.is_some() {
                        return Err(PipelineError::TemplateError(format!(
                            "duplicate [user] section at line {}",
                            i + 1
                        )));
                    }
                    if system.is_none() {
                        return Err(PipelineError::TemplateError(
                            "[user] section before [system]".to_string(),
                        ));
                    }
                    user = Some(Vec::new());
                    current = user.as_mut();
                }
                _ => match current.as_mut() {
                    Some(section) => section.push(line),
                    None => {
                        if !line.trim().is_empty() {
                            return Err(PipelineError::TemplateError(format!(
                                "content before [system] section at line {}",
                                i + 1
                            )));
                        }
                    }
                },
            }
        }
        let system = system
            .ok_or_else(|| PipelineError::TemplateError("missing [system] section".to_string()))?;
        let user = user
            .ok_or_else(|| PipelineError::TemplateError("missing [user] section".to_string()))?;
        Ok(PromptTemplate {
            system: system.join("\n").trim().to_string(),
            user: user.join("\n").trim().to_string(),
        })
    }

    /// Checks that the user section carries the placeholder the stage needs.
    pub fn validate_for(&self, stage: Stage) -> Result<(), PipelineError> {
        let required = match stage {
            Stage::Draft => "{{html}}",
            Stage::Refine => "{{draft}}",
            Stage::Critique => "{{refined}}",
        };
        if !self.user.contains(required) {
            return Err(PipelineError::TemplateError(format!(
                "{stage} template is missing the {required} placeholder"
            )));
        }
        Ok(())
    }

    /// Substitutes `{{key}}` for each provided pair in both sections.
    /// Placeholders without a provided value are left verbatim.
    pub fn render(&self, vars: &[(&str, &str)]) -> (String, String) {
        let apply = |text: &str| {
            let mut out = text.to_string();
            for (key, value) in vars {
                out = out.replace(&format!("{{{{{key}}}}}"), value);
            }
            out
        };
        (apply(&self.system), apply(&self.user))
    }

    /// Content hash recorded in the run manifest.
    pub fn hash(&self) -> String {
        let canonical = format!("[system]\n{}\n[user]\n{}\n", self.system, self.user);
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// The instruction part of a rendered user prompt: everything before the
/// document payload.
pub(crate) fn instruction_of(user_prompt: &str) -> String {
    match user_prompt.find(DOCUMENT_MARKER) {
        Some(idx) => user_prompt[..idx].to_string(),
        None => user_prompt.to_string(),
    }
}

/// The built-in template for a (task, stage) pair.
pub fn builtin_template(task: Task, stage: Stage) -> PromptTemplate {
    let (system, user) = match (task, stage) {
        (Task::Markdown, Stage::Draft) => (
            "You convert web pages to clean Markdown. Keep only the main content: drop \
             navigation, advertisements, cookie banners, and footers. Preserve headings, \
             lists, tables, links, images, and code blocks. Output Markdown only.",
            "Convert the following HTML document to clean Markdown.\
             \n\nDocument:\n```html\n{{html}}\n```",
        ),
        (Task::Json, Stage::Draft) => (
            "You extract structured data from web pages. Produce a single JSON object that \
             conforms to the provided schema. Output JSON only, with no commentary.",
            "Extract a JSON object matching this schema.\n\nSchema:\n```json\n{{schema}}\n```\
             \n\nDocument:\n```html\n{{html}}\n```",
        ),
        (Task::Markdown, Stage::Refine) => (
            "You refine draft Markdown conversions. Remove redundancy and noise, fix \
             structural inconsistencies, and keep the content faithful to the source \
             document. Output Markdown only.",
            "Refine the draft conversion below.\
             \n\nDocument:\n```html\n{{html}}\n```\n\nDraft:\n```markdown\n{{draft}}\n```",
        ),
        (Task::Json, Stage::Refine) => (
            "You refine draft JSON extractions. Fix structural issues and drop values the \
             document does not support, keeping the object schema-conformant. Output JSON \
             only.",
            "Refine the draft extraction below.\n\nSchema:\n```json\n{{schema}}\n```\
             \n\nDocument:\n```html\n{{html}}\n```\n\nDraft:\n```json\n{{draft}}\n```",
        ),
        (Task::Markdown, Stage::Critique) => (
            "You are a strict reviewer of HTML-to-Markdown conversions. Judge whether the \
             refined output is a faithful, clean conversion of the document's main content. \
             The first line of your answer must be exactly PASS or FAIL, followed by a brief \
             explanation.",
            "Review this conversion.\n\nInstruction:\n{{instruction}}\
             \n\nDocument:\n```html\n{{html}}\n```\
             \n\nRefined output:\n```markdown\n{{refined}}\n```",
        ),
        (Task::Json, Stage::Critique) => (
            "You are a strict reviewer of structured data extractions. Judge whether the \
             refined JSON is accurate, schema-conformant, and supported by the document. \
             The first line of your answer must be exactly PASS or FAIL, followed by a brief \
             explanation.",
            "Review this extraction.\n\nInstruction:\n{{instruction}}\
             \n\nDocument:\n```html\n{{html}}\n```\
             \n\nRefined output:\n```json\n{{refined}}\n```",
        ),
    };
    PromptTemplate { system: system.to_string(), user: user.to_string() }
}

/// The templates a run uses, one per stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTemplates {
    pub draft: PromptTemplate,
    pub refine: PromptTemplate,
    pub critique: PromptTemplate,
}

impl StageTemplates {
    /// The built-in defaults for a task.
    pub fn builtin(task: Task) -> StageTemplates {
        StageTemplates {
            draft: builtin_template(task, Stage::Draft),
            refine: builtin_template(task, Stage::Refine),
            critique: builtin_template(task, Stage::Critique),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.draft.validate_for(Stage::Draft)?;
        self.refine.validate_for(Stage::Refine)?;
        self.critique.validate_for(Stage::Critique)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_section_files() {
        let t = PromptTemplate::parse("[system]\nBe terse.\n[user]\nConvert {{html}} now.\n")
            .unwrap();
        assert_eq!(t.system, "Be terse.");
        assert_eq!(t.user, "Convert {{html}} now.");
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(PromptTemplate::parse("no sections at all").is_err());
        assert!(PromptTemplate::parse("[system]\nx\n").is_err());
        assert!(PromptTemplate::parse("[user]\nx\n[system]\ny\n").is_err());
        assert!(PromptTemplate::parse("[system]\nx\n[user]\ny\n[system]\nz\n").is_err());
    }

    #[test]
    fn render_substitutes_placeholders() {
        let t = PromptTemplate {
            system: "sys {{a}}".to_string(),
            user: "user {{a}} {{b}} {{missing}}".to_string(),
        };
        let (s, u) = t.render(&[("a", "1"), ("b", "2")]);
        assert_eq!(s, "sys 1");
        assert_eq!(u, "user 1 2 {{missing}}");
    }

    #[test]
    fn builtins_validate_and_hash_stably() {
        for task in [Task::Markdown, Task::Json] {
            let ts = StageTemplates::builtin(task);
            ts.validate().unwrap();
            assert_eq!(ts.draft.hash(), ts.draft.hash());
            assert_eq!(ts.draft.hash().len(), 64);
        }
        // Different stages hash differently.
        let a = builtin_template(Task::Markdown, Stage::Draft).hash();
        let b = builtin_template(Task::Markdown, Stage::Refine).hash();
        assert_ne!(a, b);
    }

    #[test]
    fn instruction_strips_document_payload() {
        let ts = StageTemplates::builtin(Task::Markdown);
        let (_, user) = ts.draft.render(&[("html", "<p>x</p>")]);
        let instr = instruction_of(&user);
        assert!(instr.contains("Convert the following HTML document"));
        assert!(!instr.contains("<p>x</p>"));
        assert_eq!(instruction_of("no marker here"), "no marker here");
    }

    #[test]
    fn json_draft_instruction_keeps_schema() {
        let ts = StageTemplates::builtin(Task::Json);
        let (_, user) = ts.draft.render(&[("schema", "{\"type\":\"object\"}"), ("html", "<p>x</p>")]);
        let instr = instruction_of(&user);
        assert!(instr.contains("{\"type\":\"object\"}"));
        assert!(!instr.contains("<p>x</p>"));
    }

    #[test]
    fn validate_for_catches_missing_placeholders() {
        let t = PromptTemplate { system: "s".to_string(), user: "no placeholder".to_string() };
        assert!(t.validate_for(Stage::Draft).is_err());
        assert!(t.validate_for(Stage::Refine).is_err());
        assert!(t.validate_for(Stage::Critique).is_err());
    }
}
