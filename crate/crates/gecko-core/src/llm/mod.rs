//! Uniform interface to the helper/judge LLM roles, with a live HTTP
//! implementation and a deterministic record/replay implementation.
//! Under replay mode the whole environment is a deterministic function of
//! its inputs; every other module's determinism claim rests on that.

mod live;
mod replay;

pub use live::{LiveBackend, LiveConfig};
pub use replay::{FixtureEntry, FixtureMode, FixtureStore, RecordingBackend, ReplayBackend};

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// The helper/judge roles an environment component may invoke. Each role is
/// bound to its own prompt template and may be routed to its own model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmRole {
    SemanticValidator,
    ResponseGenerator,
    StateBootstrapper,
    StateUpdater,
    Checklist,
    Judge,
    SchemaConverter,
}

impl LlmRole {
    pub const ALL: [LlmRole; 7] = [
        LlmRole::SemanticValidator,
        LlmRole::ResponseGenerator,
        LlmRole::StateBootstrapper,
        LlmRole::StateUpdater,
        LlmRole::Checklist,
        LlmRole::Judge,
        LlmRole::SchemaConverter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LlmRole::SemanticValidator => "semantic_validator",
            LlmRole::ResponseGenerator => "response_generator",
            LlmRole::StateBootstrapper => "state_bootstrapper",
            LlmRole::StateUpdater => "state_updater",
            LlmRole::Checklist => "checklist",
            LlmRole::Judge => "judge",
            LlmRole::SchemaConverter => "schema_converter",
        }
    }
}

/// One completion request. `session` attributes usage to a session ledger;
/// requests issued outside any session (e.g. offline schema conversion)
/// leave it unset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlmRequest {
    pub role: LlmRole,
    pub prompt: String,
    pub structured_output_required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
}

impl LlmRequest {
    pub fn new(role: LlmRole, prompt: impl Into<String>) -> Self {
        LlmRequest {
            role,
            prompt: prompt.into(),
            structured_output_required: true,
            session: None,
        }
    }

    pub fn for_session(mut self, session: impl Into<String>) -> Self {
        self.session = Some(session.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("llm backend unavailable: {0}")]
    Unavailable(String),
    #[error("no recorded fixture for key {0}")]
    FixtureMissing(String),
    #[error("rate limited, retry after {retry_after_secs}s")]
    RateLimited { retry_after_secs: u64 },
}

/// Backend abstraction over every helper-LLM exchange. Implementations must
/// be safe to call from concurrent sessions.
pub trait LlmBackend: Send + Sync {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError>;
}

/// Content key for a request: hash of the canonicalized role + prompt.
/// Content keying (rather than sequence numbering) keeps replay aligned
/// when snapshot/restore re-executes a prefix.
pub fn fixture_key(role: LlmRole, prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(role.as_str().as_bytes());
    hasher.update(b"\n");
    hasher.update(prompt.as_bytes());
    hex::encode(hasher.finalize())
}

/// Digest of the prompt alone, stored in fixtures for debugging.
pub fn prompt_digest(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Rough token estimate used for accounting when the transport does not
/// report usage (replay mode always, live mode as fallback).
pub fn approx_tokens(text: &str) -> u64 {
    (text.chars().count() as u64 + 3) / 4
}

/// Extracts the JSON value from completion text, tolerating markdown fences
/// and surrounding prose. Components that require machine-parseable answers
/// run their structured output through this before falling back.
pub fn extract_json(text: &str) -> Option<serde_json::Value> {
    let trimmed = text.trim();
    if let Ok(value) = serde_json::from_str(trimmed) {
        return Some(value);
    }
    // Markdown fence: drop the first line and anything after the closing fence.
    if let Some(rest) = trimmed.strip_prefix("```") {
        let body = rest.split_once('\n').map(|(_, b)| b).unwrap_or(rest);
        let body = body.split("```").next().unwrap_or(body).trim();
        if let Ok(value) = serde_json::from_str(body) {
            return Some(value);
        }
    }
    // Last resort: the widest brace-delimited span.
    let start = trimmed.find('{')?;
    let end = trimmed.rfind('}')?;
    if end <= start {
        return None;
    }
    serde_json::from_str(&trimmed[start..=end]).ok()
}

/// Per-session token and call totals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub calls_per_role: BTreeMap<String, u64>,
}

impl Usage {
    pub fn total_calls(&self) -> u64 {
        self.calls_per_role.values().sum()
    }
}

/// Accumulates usage per session. Counters only ever grow.
#[derive(Debug, Default)]
pub struct UsageLedger {
    per_session: Mutex<HashMap<String, Usage>>,
}

impl UsageLedger {
    pub fn new() -> Self {
        UsageLedger::default()
    }

    pub fn record(&self, session: &str, role: LlmRole, prompt_tokens: u64, completion_tokens: u64) {
        let mut sessions = self.per_session.lock().expect("usage ledger poisoned");
        let usage = sessions.entry(session.to_string()).or_default();
        usage.prompt_tokens += prompt_tokens;
        usage.completion_tokens += completion_tokens;
        *usage
            .calls_per_role
            .entry(role.as_str().to_string())
            .or_insert(0) += 1;
    }

    /// Totals for a session; all zeros when the session never used the LLM.
    pub fn usage(&self, session: &str) -> Usage {
        self.per_session
            .lock()
            .expect("usage ledger poisoned")
            .get(session)
            .cloned()
            .unwrap_or_default()
    }
}

/// Wraps any backend with per-session usage accounting.
pub struct AccountingBackend<B> {
    inner: B,
    ledger: std::sync::Arc<UsageLedger>,
}

impl<B: LlmBackend> AccountingBackend<B> {
    pub fn new(inner: B, ledger: std::sync::Arc<UsageLedger>) -> Self {
        AccountingBackend { inner, ledger }
    }
}

impl<B: LlmBackend> LlmBackend for AccountingBackend<B> {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let completion = self.inner.complete(req)?;
        if let Some(session) = &req.session {
            self.ledger.record(
                session,
                req.role,
                approx_tokens(&req.prompt),
                approx_tokens(&completion),
            );
        }
        Ok(completion)
    }
}

impl<T: LlmBackend + ?Sized> LlmBackend for std::sync::Arc<T> {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        (**self).complete(req)
    }
}
