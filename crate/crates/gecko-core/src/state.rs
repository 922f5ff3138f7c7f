//! The compact task-state record: bootstrapped from the task description,
//! then revised by a helper LLM after every valid tool call. The state is
//! the environment's central reference for grounding later calls.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::llm::{extract_json, LlmBackend, LlmError, LlmRequest, LlmRole};
use crate::prompt::PromptTemplates;
use crate::response::SimulatedResponse;
use crate::schema::ToolSchema;
use crate::validate::ToolCall;

/// Key-value record of task progress. Entries keep their emission order;
/// versions increase strictly along a session's history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskState {
    pub entries: IndexMap<String, String>,
    pub version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_from_call: Option<String>,
}

impl TaskState {
    /// The version-0 state an empty session starts from.
    pub fn initial() -> Self {
        TaskState {
            entries: IndexMap::new(),
            version: 0,
            derived_from_call: None,
        }
    }

    pub fn with_entries(entries: IndexMap<String, String>) -> Self {
        TaskState {
            entries,
            version: 0,
            derived_from_call: None,
        }
    }

    /// Renders the state as `key: value` lines for use in prompts.
    pub fn text(&self) -> String {
        if self.entries.is_empty() {
            return "(empty)".to_string();
        }
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Deserialize)]
struct StateAnswer {
    entries: Vec<StateEntry>,
}

#[derive(Deserialize)]
struct StateEntry {
    key: String,
    #[serde(default)]
    value: String,
}

fn parse_entries(completion: &str) -> Option<IndexMap<String, String>> {
    let value = extract_json(completion)?;
    let answer: StateAnswer = serde_json::from_value(value).ok()?;
    let mut entries = IndexMap::new();
    for entry in answer.entries {
        entries.insert(entry.key, entry.value);
    }
    Some(entries)
}

fn schemas_text(schemas: &[std::sync::Arc<ToolSchema>]) -> String {
    if schemas.is_empty() {
        return "(none)".to_string();
    }
    schemas
        .iter()
        .map(|s| crate::schema::serialize_schema(s))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Builds the version-0 state from the task description and the session's
/// registered schemas. An empty entry map is legal for tasks with nothing
/// to track.
pub fn bootstrap_state(
    task: &str,
    schemas: &[std::sync::Arc<ToolSchema>],
    llm: &dyn LlmBackend,
    templates: &PromptTemplates,
    session: &str,
) -> Result<TaskState, LlmError> {
    let prompt = templates.render(
        LlmRole::StateBootstrapper,
        &[("task", task), ("schemas", &schemas_text(schemas))],
    );
    let request = LlmRequest::new(LlmRole::StateBootstrapper, &prompt).for_session(session);
    if let Some(entries) = parse_entries(&llm.complete(&request)?) {
        return Ok(TaskState::with_entries(entries));
    }

    let retry_prompt = format!("{prompt}\n\nReturn only the JSON object described above.");
    let retry = LlmRequest::new(LlmRole::StateBootstrapper, &retry_prompt).for_session(session);
    if let Some(entries) = parse_entries(&llm.complete(&retry)?) {
        return Ok(TaskState::with_entries(entries));
    }

    tracing::warn!(session, "state bootstrapper answer unparseable twice, starting empty");
    Ok(TaskState::initial())
}

/// Revises the state to reflect one executed call. An unparseable answer
/// after a re-ask carries the previous entries forward so a broken update
/// cannot poison the session.
pub fn update_state(
    prev: &TaskState,
    call: &ToolCall,
    response: &SimulatedResponse,
    llm: &dyn LlmBackend,
    templates: &PromptTemplates,
) -> Result<TaskState, LlmError> {
    debug_assert_eq!(response.call_id, call.call_id);
    let call_text = serde_json::to_string(&serde_json::json!({
        "tool_name": call.tool_name,
        "arguments": call.arguments,
    }))
    .expect("call serializes");
    let response_text = serde_json::to_string(&serde_json::json!({
        "body": response.body,
        "narrative": response.narrative,
    }))
    .expect("response serializes");

    let prompt = templates.render(
        LlmRole::StateUpdater,
        &[
            ("state", &prev.text()),
            ("call", &call_text),
            ("response", &response_text),
        ],
    );

    let next = |entries: IndexMap<String, String>| TaskState {
        entries,
        version: prev.version + 1,
        derived_from_call: Some(call.call_id.clone()),
    };

    let request = LlmRequest::new(LlmRole::StateUpdater, &prompt).for_session(&call.session_id);
    if let Some(entries) = parse_entries(&llm.complete(&request)?) {
        return Ok(next(entries));
    }

    let retry_prompt = format!("{prompt}\n\nReturn only the JSON object described above.");
    let retry = LlmRequest::new(LlmRole::StateUpdater, &retry_prompt).for_session(&call.session_id);
    if let Some(entries) = parse_entries(&llm.complete(&retry)?) {
        return Ok(next(entries));
    }

    tracing::warn!(
        call_id = call.call_id,
        "state updater answer unparseable twice, carrying previous entries forward"
    );
    Ok(next(prev.entries.clone()))
}
