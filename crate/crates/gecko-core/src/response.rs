//! Schema-compliant response synthesis for validated tool calls. The
//! generator is conditioned on the current task state so its outputs stay
//! consistent with earlier calls, and every body is structurally checked
//! against the tool's response schema before it leaves this module.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::llm::{extract_json, LlmBackend, LlmError, LlmRequest, LlmRole};
use crate::prompt::PromptTemplates;
use crate::schema::{serialize_schema, value_spec_json, ToolSchema};
use crate::state::TaskState;
use crate::validate::{validate_value, ToolCall, Violation};

/// How many repair rounds a non-conforming generation gets before failing.
pub const REPAIR_ROUNDS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedResponse {
    pub call_id: String,
    pub body: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub narrative: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("response body still non-conforming after {REPAIR_ROUNDS} repair rounds")]
    NonconformingAfterRetries { violations: Vec<Violation> },
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Deserialize)]
struct GeneratedAnswer {
    body: Value,
    #[serde(default)]
    narrative: Option<String>,
}

fn parse_answer(completion: &str) -> Option<GeneratedAnswer> {
    serde_json::from_value(extract_json(completion)?).ok()
}

fn conformance(body: &Value, schema: &ToolSchema) -> Vec<Violation> {
    match &schema.response_schema {
        Some(spec) => validate_value("body", body, spec),
        // Void-style acknowledgment: nothing to check.
        None => Vec::new(),
    }
}

/// Synthesizes a response for a call that passed validation. Non-conforming
/// LLM output is re-prompted with the violation list up to `REPAIR_ROUNDS`
/// times, then surfaces as `GenError`.
pub fn generate_response(
    call: &ToolCall,
    schema: &ToolSchema,
    state: &TaskState,
    llm: &dyn LlmBackend,
    templates: &PromptTemplates,
) -> Result<SimulatedResponse, GenError> {
    let response_schema_text = match &schema.response_schema {
        Some(spec) => serde_json::to_string(&value_spec_json(spec)).expect("spec serializes"),
        None => "(no declared response body; return {} as the body)".to_string(),
    };
    let call_text = serde_json::to_string(&serde_json::json!({
        "tool_name": call.tool_name,
        "arguments": call.arguments,
    }))
    .expect("call serializes");

    let base_prompt = templates.render(
        LlmRole::ResponseGenerator,
        &[
            ("schema", &serialize_schema(schema)),
            ("call", &call_text),
            ("state", &state.text()),
            ("response_schema", &response_schema_text),
        ],
    );

    let mut prompt = base_prompt.clone();
    let mut last_violations = Vec::new();
    for round in 0..=REPAIR_ROUNDS {
        let request =
            LlmRequest::new(LlmRole::ResponseGenerator, &prompt).for_session(&call.session_id);
        let completion = llm.complete(&request)?;
        match parse_answer(&completion) {
            Some(answer) => {
                let violations = conformance(&answer.body, schema);
                if violations.is_empty() {
                    return Ok(SimulatedResponse {
                        call_id: call.call_id.clone(),
                        body: answer.body,
                        narrative: answer.narrative,
                    });
                }
                if round < REPAIR_ROUNDS {
                    let listing = violations
                        .iter()
                        .map(|v| format!("- {} ({}): {}", v.parameter, v.rule, v.message))
                        .collect::<Vec<_>>()
                        .join("\n");
                    prompt = format!(
                        "{base_prompt}\n\nYour previous body failed validation:\n{listing}\nReturn a corrected JSON object of the same shape."
                    );
                }
                last_violations = violations;
            }
            None => {
                if round < REPAIR_ROUNDS {
                    prompt = format!(
                        "{base_prompt}\n\nYour previous answer was not parseable JSON. Return only the JSON object described above."
                    );
                }
                last_violations = vec![Violation {
                    parameter: String::new(),
                    rule: "unparseable".to_string(),
                    message: "generator answer was not parseable JSON".to_string(),
                }];
            }
        }
    }

    Err(GenError::NonconformingAfterRetries {
        violations: last_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{AccessClass, ParamType, ValueSpec};
    use serde_json::json;
    use std::sync::Mutex;

    struct Script(Mutex<Vec<String>>);

    impl Script {
        fn new(answers: Vec<&str>) -> Self {
            Script(Mutex::new(
                answers.into_iter().rev().map(String::from).collect(),
            ))
        }
    }

    impl LlmBackend for Script {
        fn complete(&self, _req: &LlmRequest) -> Result<String, LlmError> {
            Ok(self.0.lock().unwrap().pop().expect("script exhausted"))
        }
    }

    fn schema_with_response(response_schema: Option<ValueSpec>) -> ToolSchema {
        ToolSchema {
            tool_name: "remove_from_cart".into(),
            description: "remove an item".into(),
            parameters: vec![],
            response_schema,
            access_class: AccessClass::Write,
        }
    }

    fn object_response_schema() -> ValueSpec {
        let mut spec = ValueSpec::new(ParamType::Object);
        let mut props = std::collections::BTreeMap::new();
        props.insert("ok".to_string(), ValueSpec::new(ParamType::Boolean));
        props.insert("remaining".to_string(), ValueSpec::new(ParamType::Integer));
        spec.properties = Some(props);
        spec.required = Some(vec!["ok".to_string(), "remaining".to_string()]);
        spec
    }

    fn call() -> ToolCall {
        ToolCall {
            tool_name: "remove_from_cart".into(),
            arguments: json!({"item": "apple"}).as_object().unwrap().clone(),
            call_id: "call-1".into(),
            session_id: "s1".into(),
        }
    }

    #[test]
    fn conforming_answer_is_returned_as_is() {
        let backend = Script::new(vec![
            r#"{"body": {"ok": true, "remaining": 2}, "narrative": "removed one apple"}"#,
        ]);
        let response = generate_response(
            &call(),
            &schema_with_response(Some(object_response_schema())),
            &TaskState::initial(),
            &backend,
            &PromptTemplates::builtin(),
        )
        .unwrap();
        assert_eq!(response.call_id, "call-1");
        assert_eq!(response.body, json!({"ok": true, "remaining": 2}));
        assert_eq!(response.narrative.as_deref(), Some("removed one apple"));
    }

    #[test]
    fn missing_required_field_gets_one_repair_round() {
        let backend = Script::new(vec![
            r#"{"body": {"ok": true}, "narrative": "first try"}"#,
            r#"{"body": {"ok": true, "remaining": 2}, "narrative": "second try"}"#,
        ]);
        let response = generate_response(
            &call(),
            &schema_with_response(Some(object_response_schema())),
            &TaskState::initial(),
            &backend,
            &PromptTemplates::builtin(),
        )
        .unwrap();
        assert_eq!(response.body["remaining"], json!(2));
        assert_eq!(response.narrative.as_deref(), Some("second try"));
    }

    #[test]
    fn persistent_nonconformance_is_an_error() {
        let bad = r#"{"body": {"ok": "yes"}, "narrative": "still wrong"}"#;
        let backend = Script::new(vec![bad, bad, bad]);
        let err = generate_response(
            &call(),
            &schema_with_response(Some(object_response_schema())),
            &TaskState::initial(),
            &backend,
            &PromptTemplates::builtin(),
        )
        .unwrap_err();
        match err {
            GenError::NonconformingAfterRetries { violations } => {
                assert!(!violations.is_empty());
            }
            other => panic!("expected nonconforming error, got {other:?}"),
        }
    }

    #[test]
    fn void_schema_accepts_empty_body_with_narrative() {
        let backend = Script::new(vec![r#"{"body": {}, "narrative": "acknowledged"}"#]);
        let response = generate_response(
            &call(),
            &schema_with_response(None),
            &TaskState::initial(),
            &backend,
            &PromptTemplates::builtin(),
        )
        .unwrap();
        assert_eq!(response.body, json!({}));
        assert!(response.narrative.is_some());
    }

    #[test]
    fn generation_prompt_carries_call_schema_and_state() {
        struct Capture(Mutex<String>);
        impl LlmBackend for Capture {
            fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
                *self.0.lock().unwrap() = req.prompt.clone();
                Ok(r#"{"body": {}, "narrative": "ok"}"#.into())
            }
        }
        let capture = Capture(Mutex::new(String::new()));
        let mut entries = indexmap::IndexMap::new();
        entries.insert("apples in cart".to_string(), "3".to_string());
        generate_response(
            &call(),
            &schema_with_response(None),
            &TaskState::with_entries(entries),
            &capture,
            &PromptTemplates::builtin(),
        )
        .unwrap();
        let prompt = capture.0.lock().unwrap().clone();
        assert!(prompt.contains("remove_from_cart"));
        assert!(prompt.contains("apples in cart: 3"));
        assert!(prompt.contains("\"item\":\"apple\""));
    }
}
