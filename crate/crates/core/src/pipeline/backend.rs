//! Generation backends: a deterministic mock, a closure-driven scripted
//! backend for tests, and an HTTP chat-completion client.

use std::time::Duration;

use super::{BackendError, GenerationBackend, GenerationParams};
use crate::html::parse_str;
use crate::markdown::{convert, ExtractionInstruction};

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Extracts the contents of the first fenced code block after `marker`.
/// The fence's info string (e.g. `html`) is skipped.
fn fenced_after<'a>(prompt: &'a str, marker: &str) -> Option<&'a str> {
    let at = prompt.find(marker)? + marker.len();
    let rest = &prompt[at..];
    let fence_start = rest.find("```")?;
    let after_fence = &rest[fence_start + 3..];
    let body_start = after_fence.find('\n')? + 1;
    let body = &after_fence[body_start..];
    let end = body.find("\n```")?;
    Some(&body[..end])
}

/// A deterministic, dependency-free backend for tests, demos, and offline
/// runs. It recognizes the pipeline's built-in prompt shapes:
///
/// - critique prompts (containing a `Refined output:` section) get a
///   hash-keyed PASS/FAIL verdict at roughly a 2:1 ratio;
/// - refine prompts (containing a `Draft:` section) echo the draft back
///   unchanged, making refinement purely mechanical;
/// - draft prompts are answered with a real conversion of the embedded
///   document — Markdown via this crate's converter (with a hash-keyed
///   duplicated first block as synthetic noise), JSON as a schema-guided
///   dummy object (hash-keyed pretty or compact formatting).
///
/// `variant` changes every hash decision, so two mock instances with
/// different variants behave like different models.
#[derive(Debug, Clone)]
pub struct MockBackend {
    name: String,
    variant: u64,
    delay: Option<Duration>,
}

impl Default for MockBackend {
    fn default() -> Self {
        MockBackend::new()
    }
}

impl MockBackend {
    pub fn new() -> MockBackend {
        MockBackend { name: "mock".to_string(), variant: 0, delay: None }
    }

    /// A behaviorally distinct mock (different noise/verdict pattern and name).
    pub fn with_variant(variant: u64) -> MockBackend {
        MockBackend { name: format!("mock-v{variant}"), variant, delay: None }
    }

    /// Sleeps this long on every call; used by interruption tests to widen
    /// the window a run spends mid-stage.
    pub fn with_delay(mut self, delay: Duration) -> MockBackend {
        self.delay = Some(delay);
        self
    }

    fn keyed(&self, text: &str) -> u64 {
        fnv1a(text) ^ self.variant.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    fn critique(&self, user_prompt: &str) -> String {
        if self.keyed(user_prompt) % 3 < 2 {
            "PASS\nThe refined output is faithful to the document.".to_string()
        } else {
            "FAIL\nThe refined output does not match the document closely enough.".to_string()
        }
    }

    fn draft_markdown(&self, html: &str) -> String {
        let tree = parse_str(html);
        let body = match convert(&tree, &ExtractionInstruction::default()) {
            Ok(doc) => doc.body,
            Err(_) => String::new(),
        };
        if body.is_empty() {
            return "(empty document)\n".to_string();
        }
        // Synthetic draft noise: roughly half of all documents get their
        // first block duplicated, which the refine stage then removes.
        if self.keyed(html) % 2 == 0 {
            if let Some(first) = body.split("\n\n").next() {
                return format!("{first}\n\n{body}");
            }
        }
        body
    }

    fn draft_json(&self, html: &str, schema_text: Option<&str>) -> String {
        use serde_json::{json, Map, Value};
        let text = parse_str(html).inner_text();
        let h = self.keyed(html);
        let schema: Option<Value> =
            schema_text.and_then(|s| serde_json::from_str(s).ok());
        let mut obj = Map::new();
        if let Some(props) = schema
            .as_ref()
            .and_then(|s| s.get("properties"))
            .and_then(|p| p.as_object())
        {
            for (key, prop) in props {
                let ty = prop.get("type").and_then(|t| t.as_str()).unwrap_or("string");
                let value = match ty {
                    "integer" => json!((h % 1000) as i64),
                    "number" => json!((h % 1000) as f64 / 2.0),
                    "boolean" => json!(h % 2 == 0),
                    "array" => json!([]),
                    "object" => json!({}),
                    "null" => Value::Null,
                    _ => {
                        let words: Vec<&str> = text.split_whitespace().take(4).collect();
                        if words.is_empty() {
                            json!(key.clone())
                        } else {
                            json!(words.join(" "))
                        }
                    }
                };
                obj.insert(key.clone(), value);
            }
        } else {
            obj.insert("text".to_string(), json!(text.split_whitespace().take(8).collect::<Vec<_>>().join(" ")));
        }
        let value = Value::Object(obj);
        // Hash-keyed formatting noise: pretty-printed drafts get compacted by
        // the refine stage (changed=true), compact drafts pass through.
        if h % 2 == 0 {
            serde_json::to_string_pretty(&value).expect("serializable")
        } else {
            serde_json::to_string(&value).expect("serializable")
        }
    }
}

impl GenerationBackend for MockBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn generate(
        &self,
        _system_prompt: &str,
        user_prompt: &str,
        _params: &GenerationParams,
    ) -> Result<String, BackendError> {
        if let Some(d) = self.delay {
            std::thread::sleep(d);
        }
        if user_prompt.contains("Refined output:") {
            return Ok(self.critique(user_prompt));
        }
        if let Some(draft) = fenced_after(user_prompt, "Draft:") {
            return Ok(draft.to_string());
        }
        let html = fenced_after(user_prompt, "Document:")
            .ok_or_else(|| BackendError::new("mock backend: no Document section in prompt"))?;
        if user_prompt.contains("Schema:") {
            Ok(self.draft_json(html, fenced_after(user_prompt, "Schema:")))
        } else {
            Ok(self.draft_markdown(html))
        }
    }
}

type GenerateFn =
    dyn Fn(&str, &str, &GenerationParams) -> Result<String, BackendError> + Send + Sync;

/// A backend driven by a closure; the building block for scripted
/// fault-injection backends in tests.
pub struct FnBackend {
    name: String,
    deterministic: bool,
    f: Box<GenerateFn>,
}

impl FnBackend {
    pub fn new(
        name: impl Into<String>,
        deterministic: bool,
        f: impl Fn(&str, &str, &GenerationParams) -> Result<String, BackendError>
            + Send
            + Sync
            + 'static,
    ) -> FnBackend {
        FnBackend { name: name.into(), deterministic, f: Box::new(f) }
    }
}

impl GenerationBackend for FnBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn deterministic(&self) -> bool {
        self.deterministic
    }

    fn generate(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &GenerationParams,
    ) -> Result<String, BackendError> {
        (self.f)(system_prompt, user_prompt, params)
    }
}

/// Configuration for [`HttpBackend`].
#[derive(Debug, Clone)]
pub struct HttpBackendConfig {
    /// Chat-completion endpoint URL.
    pub url: String,
    /// Model identifier sent in the request body.
    pub model: String,
    /// Environment variable holding the bearer token.
    pub token_env: String,
    pub timeout: Duration,
}

impl Default for HttpBackendConfig {
    fn default() -> Self {
        HttpBackendConfig {
            url: String::new(),
            model: String::new(),
            token_env: "HTMLSIFT_API_TOKEN".to_string(),
            timeout: Duration::from_secs(120),
        }
    }
}

/// A chat-completion HTTP backend. Sends
/// `{model, messages, max_tokens, temperature, seed}` with bearer-token auth
/// and reads the reply from `choices[0].message.content`.
pub struct HttpBackend {
    name: String,
    config: HttpBackendConfig,
    token: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    /// Fails fast (before any network traffic) when the token environment
    /// variable is missing or empty.
    pub fn new(config: HttpBackendConfig) -> Result<HttpBackend, BackendError> {
        let token = std::env::var(&config.token_env).map_err(|_| {
            BackendError::new(format!(
                "environment variable {} is not set (required for bearer auth)",
                config.token_env
            ))
        })?;
        if token.is_empty() {
            return Err(BackendError::new(format!(
                "environment variable {} is empty",
                config.token_env
            )));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::new(format!("http client: {e}")))?;
        Ok(HttpBackend { name: format!("http:{}", config.model), config, token, client })
    }
}

impl GenerationBackend for HttpBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn generate(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &GenerationParams,
    ) -> Result<String, BackendError> {
        let body = serde_json::json!({
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "max_tokens": params.max_output_tokens,
            "temperature": params.temperature,
            "seed": params.seed,
        });
        let response = self
            .client
            .post(&self.config.url)
            .bearer_auth(&self.token)
            .json(&body)
            .send()
            .map_err(|e| BackendError::new(format!("request failed: {e}")))?;
        let status = response.status();
        if !status.is_success() {
            let text = response.text().unwrap_or_default();
            return Err(BackendError::new(format!(
                "http {status}: {}",
                text.chars().take(300).collect::<String>()
            )));
        }
        let value: serde_json::Value = response
            .json()
            .map_err(|e| BackendError::new(format!("invalid json response: {e}")))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(|s| s.to_string())
            .ok_or_else(|| {
                BackendError::new("response has no choices[0].message.content".to_string())
            })
    }
}
