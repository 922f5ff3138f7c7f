//! Live transport: JSON-over-HTTP chat-completions with per-role model
//! routing, retry with exponential backoff, and environment-variable
//! configuration for secrets.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{LlmBackend, LlmError, LlmRequest, LlmRole};

pub const ENDPOINT_ENV: &str = "GECKO_LLM_ENDPOINT";
pub const API_KEY_ENV: &str = "GECKO_LLM_API_KEY";
pub const MODEL_ENV: &str = "GECKO_LLM_MODEL";

const TRANSPORT_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Base URL of a chat-completions style endpoint.
    pub endpoint: String,
    pub api_key: Option<String>,
    /// Default model when a role has no dedicated binding.
    pub model: String,
    /// Per-role model routing, e.g. a cheap model for semantic validation
    /// and a stronger one for judging.
    pub models_per_role: BTreeMap<LlmRole, String>,
    pub temperature: f64,
    pub timeout: Duration,
}

impl LiveConfig {
    /// Reads endpoint/model/key from the environment. Per-role models come
    /// from `GECKO_LLM_MODEL_<ROLE>` (role name upper-cased).
    pub fn from_env() -> Result<Self, LlmError> {
        let endpoint = std::env::var(ENDPOINT_ENV)
            .map_err(|_| LlmError::Unavailable(format!("{ENDPOINT_ENV} is not set")))?;
        let model = std::env::var(MODEL_ENV)
            .map_err(|_| LlmError::Unavailable(format!("{MODEL_ENV} is not set")))?;
        let mut models_per_role = BTreeMap::new();
        for role in LlmRole::ALL {
            let var = format!("{MODEL_ENV}_{}", role.as_str().to_uppercase());
            if let Ok(model) = std::env::var(&var) {
                models_per_role.insert(role, model);
            }
        }
        Ok(LiveConfig {
            endpoint,
            api_key: std::env::var(API_KEY_ENV).ok(),
            model,
            models_per_role,
            temperature: 0.0,
            timeout: Duration::from_secs(120),
        })
    }

    pub fn model_for(&self, role: LlmRole) -> &str {
        self.models_per_role.get(&role).unwrap_or(&self.model)
    }
}

pub struct LiveBackend {
    config: LiveConfig,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(config.timeout)
            .build();
        LiveBackend { config, agent }
    }

    pub fn from_env() -> Result<Self, LlmError> {
        Ok(LiveBackend::new(LiveConfig::from_env()?))
    }

    fn request_once(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let url = format!(
            "{}/chat/completions",
            self.config.endpoint.trim_end_matches('/')
        );
        let mut call = self.agent.post(&url);
        if let Some(key) = &self.config.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let mut body = json!({
            "model": self.config.model_for(req.role),
            "messages": [{ "role": "user", "content": req.prompt }],
            "temperature": self.config.temperature,
        });
        if req.structured_output_required {
            body["response_format"] = json!({ "type": "json_object" });
        }
        let response = call.send_json(body).map_err(|err| match err {
            ureq::Error::Status(429, resp) => {
                let retry_after_secs = resp
                    .header("retry-after")
                    .and_then(|v| v.parse().ok())
                    .unwrap_or(1);
                LlmError::RateLimited { retry_after_secs }
            }
            ureq::Error::Status(code, resp) => {
                let detail = resp.into_string().unwrap_or_default();
                LlmError::Unavailable(format!("provider returned {code}: {detail}"))
            }
            ureq::Error::Transport(t) => LlmError::Unavailable(format!("transport: {t}")),
        })?;
        let parsed: ChatResponse = response
            .into_json()
            .map_err(|err| LlmError::Unavailable(format!("bad provider payload: {err}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| LlmError::Unavailable("provider returned no choices".into()))
    }
}

impl LlmBackend for LiveBackend {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let mut backoff = Duration::from_millis(250);
        let mut last_err = LlmError::Unavailable("no attempt made".into());
        for attempt in 0..TRANSPORT_ATTEMPTS {
            match self.request_once(req) {
                Ok(text) => return Ok(text),
                Err(err @ LlmError::RateLimited { .. }) => return Err(err),
                Err(err) => {
                    tracing::warn!(attempt, %err, "llm transport failure");
                    last_err = err;
                    if attempt + 1 < TRANSPORT_ATTEMPTS {
                        std::thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(last_err)
    }
}
