//! Argument validation for tool calls: deterministic rule checks against
//! the schema first, then an optional LLM-based semantic check. Rule
//! failures short-circuit; the LLM is never consulted for a call that is
//! already structurally wrong.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::llm::{extract_json, LlmBackend, LlmError, LlmRequest, LlmRole};
use crate::prompt::PromptTemplates;
use crate::schema::{ConstraintSet, ParamType, ToolSchema, ValueSpec};

/// A named tool invocation with a JSON argument map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool_name: String,
    pub arguments: Map<String, Value>,
    pub call_id: String,
    pub session_id: String,
}

impl ToolCall {
    pub fn new(tool_name: impl Into<String>, arguments: Map<String, Value>) -> Self {
        ToolCall {
            tool_name: tool_name.into(),
            arguments,
            call_id: String::new(),
            session_id: String::new(),
        }
    }

    pub fn argument_json(&self) -> Value {
        Value::Object(self.arguments.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    SyntacticError,
    SemanticError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Rules,
    Llm,
}

/// One rule failure: which parameter, which rule, and a human-readable
/// message suitable for feeding back to the planning agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub parameter: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    fn new(parameter: impl Into<String>, rule: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            parameter: parameter.into(),
            rule: rule.into(),
            message: message.into(),
        }
    }
}

/// The structured verdict for one call. Serialized verbatim into gateway
/// error responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub stage: Stage,
}

impl ValidationReport {
    pub fn pass(stage: Stage) -> Self {
        ValidationReport {
            verdict: Verdict::Pass,
            violations: Vec::new(),
            stage,
        }
    }

    pub fn syntactic(violations: Vec<Violation>) -> Self {
        debug_assert!(!violations.is_empty());
        ValidationReport {
            verdict: Verdict::SyntacticError,
            violations,
            stage: Stage::Rules,
        }
    }

    pub fn semantic(violations: Vec<Violation>) -> Self {
        debug_assert!(!violations.is_empty());
        ValidationReport {
            verdict: Verdict::SemanticError,
            violations,
            stage: Stage::Llm,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// What the semantic validator may consult beyond the call itself: the task
/// description and the latest task-state text.
#[derive(Debug, Clone, Default)]
pub struct TaskContext {
    pub task: String,
    pub state_text: String,
}

impl TaskContext {
    pub fn render(&self) -> String {
        format!("Task: {}\nTask state:\n{}", self.task, self.state_text)
    }
}

/// Rule-based validation: required-parameter presence, no undeclared
/// parameters, type conformance, and constraint enforcement. Violations
/// enumerate every failure, not just the first. Pure in (call, schema).
pub fn validate_syntactic(call: &ToolCall, schema: &ToolSchema) -> ValidationReport {
    let mut violations = Vec::new();

    for param in &schema.parameters {
        if param.required && !call.arguments.contains_key(&param.name) {
            violations.push(Violation::new(
                &param.name,
                "missing_required",
                format!("required parameter `{}` is missing", param.name),
            ));
        }
    }

    for (name, value) in &call.arguments {
        match schema.parameter(name) {
            None => violations.push(Violation::new(
                name,
                "unexpected_parameter",
                format!("parameter `{name}` is not declared by tool `{}`", call.tool_name),
            )),
            Some(param) => check_value(name, value, &param.spec, &mut violations),
        }
    }

    if violations.is_empty() {
        ValidationReport::pass(Stage::Rules)
    } else {
        ValidationReport::syntactic(violations)
    }
}

/// Structural validation of one value against its spec. Also used to check
/// generated response bodies against the tool's response schema.
pub fn validate_value(path: &str, value: &Value, spec: &ValueSpec) -> Vec<Violation> {
    let mut violations = Vec::new();
    check_value(path, value, spec, &mut violations);
    violations
}

fn check_value(path: &str, value: &Value, spec: &ValueSpec, violations: &mut Vec<Violation>) {
    if !type_matches(value, spec.value_type) {
        violations.push(Violation::new(
            path,
            "type_mismatch",
            format!(
                "expected {}, got {}",
                spec.value_type,
                json_type_name(value)
            ),
        ));
        return;
    }

    if let Some(constraints) = &spec.constraints {
        check_constraints(path, value, constraints, violations);
    }

    match spec.value_type {
        ParamType::Array => {
            if let (Some(items), Some(elements)) = (&spec.items, value.as_array()) {
                for (idx, element) in elements.iter().enumerate() {
                    check_value(&format!("{path}[{idx}]"), element, items, violations);
                }
            }
        }
        ParamType::Object => {
            let fields = value.as_object().expect("type checked above");
            let empty = std::collections::BTreeMap::new();
            let properties = spec.properties.as_ref().unwrap_or(&empty);
            if let Some(required) = &spec.required {
                for name in required {
                    if !fields.contains_key(name) {
                        violations.push(Violation::new(
                            format!("{path}.{name}"),
                            "missing_required",
                            format!("required field `{name}` is missing"),
                        ));
                    }
                }
            }
            for (name, field_value) in fields {
                let field_path = format!("{path}.{name}");
                match properties.get(name) {
                    Some(field_spec) => {
                        check_value(&field_path, field_value, field_spec, violations)
                    }
                    None => violations.push(Violation::new(
                        field_path,
                        "unexpected_parameter",
                        format!("field `{name}` is not declared"),
                    )),
                }
            }
        }
        _ => {}
    }
}

fn check_constraints(
    path: &str,
    value: &Value,
    constraints: &ConstraintSet,
    violations: &mut Vec<Violation>,
) {
    if let Some(number) = value.as_f64() {
        if let Some(min) = constraints.minimum.as_ref().and_then(|n| n.as_f64()) {
            if number < min {
                violations.push(Violation::new(
                    path,
                    "constraint.minimum",
                    format!("value {number} is below the minimum {min}"),
                ));
            }
        }
        if let Some(max) = constraints.maximum.as_ref().and_then(|n| n.as_f64()) {
            if number > max {
                violations.push(Violation::new(
                    path,
                    "constraint.maximum",
                    format!("value {number} exceeds the maximum {max}"),
                ));
            }
        }
    }

    if let Some(allowed) = &constraints.enum_values {
        if !allowed.contains(value) {
            violations.push(Violation::new(
                path,
                "constraint.enum",
                format!(
                    "value {value} is not one of the allowed values {}",
                    Value::Array(allowed.clone())
                ),
            ));
        }
    }

    if let Some(text) = value.as_str() {
        let length = text.chars().count() as u64;
        if let Some(min) = constraints.min_length {
            if length < min {
                violations.push(Violation::new(
                    path,
                    "constraint.min_length",
                    format!("length {length} is below the minimum length {min}"),
                ));
            }
        }
        if let Some(max) = constraints.max_length {
            if length > max {
                violations.push(Violation::new(
                    path,
                    "constraint.max_length",
                    format!("length {length} exceeds the maximum length {max}"),
                ));
            }
        }
        if let Some(pattern) = &constraints.pattern {
            // Compilability was checked at schema parse time.
            if let Ok(re) = regex::Regex::new(pattern) {
                if !re.is_match(text) {
                    violations.push(Violation::new(
                        path,
                        "constraint.pattern",
                        format!("value does not match the pattern `{pattern}`"),
                    ));
                }
            }
        }
    }
}

fn type_matches(value: &Value, declared: ParamType) -> bool {
    match declared {
        ParamType::Integer => value.as_i64().is_some() || value.as_u64().is_some(),
        // Integers are accepted where a number is declared, not the reverse.
        ParamType::Number => value.is_number(),
        ParamType::String => value.is_string(),
        ParamType::Boolean => value.is_boolean(),
        ParamType::Array => value.is_array(),
        ParamType::Object => value.is_object(),
    }
}

fn json_type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) if n.as_i64().is_some() || n.as_u64().is_some() => "integer",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

#[derive(Deserialize)]
struct SemanticAnswer {
    acceptable: bool,
    #[serde(default)]
    problems: Vec<SemanticProblem>,
}

#[derive(Deserialize)]
struct SemanticProblem {
    #[serde(default)]
    parameter: String,
    #[serde(default)]
    message: String,
}

/// LLM-based semantic check. Preconditions: the call already passed
/// syntactic validation. An unparseable answer triggers one re-ask; if that
/// also fails to parse, the call passes with a logged warning — a missed
/// semantic error is recoverable downstream, a false rejection is not.
pub fn validate_semantic(
    call: &ToolCall,
    schema: &ToolSchema,
    context: &TaskContext,
    llm: &dyn LlmBackend,
    templates: &PromptTemplates,
) -> Result<ValidationReport, LlmError> {
    let schema_text = crate::schema::serialize_schema(schema);
    let call_text = serde_json::to_string(&serde_json::json!({
        "tool_name": call.tool_name,
        "arguments": call.arguments,
    }))
    .expect("call serializes");

    let prompt = templates.render(
        LlmRole::SemanticValidator,
        &[
            ("schema", &schema_text),
            ("context", &context.render()),
            ("call", &call_text),
        ],
    );

    let request = LlmRequest::new(LlmRole::SemanticValidator, &prompt)
        .for_session(call.session_id.clone());
    if let Some(report) = parse_semantic(&llm.complete(&request)?) {
        return Ok(report);
    }

    let retry_prompt = format!("{prompt}\n\nReturn only the JSON object described above.");
    let retry = LlmRequest::new(LlmRole::SemanticValidator, &retry_prompt)
        .for_session(call.session_id.clone());
    if let Some(report) = parse_semantic(&llm.complete(&retry)?) {
        return Ok(report);
    }

    tracing::warn!(
        call_id = call.call_id,
        tool = call.tool_name,
        "semantic validator answer unparseable twice, defaulting to pass"
    );
    Ok(ValidationReport::pass(Stage::Llm))
}

fn parse_semantic(completion: &str) -> Option<ValidationReport> {
    let value = extract_json(completion)?;
    let answer: SemanticAnswer = serde_json::from_value(value).ok()?;
    if answer.acceptable {
        Some(ValidationReport::pass(Stage::Llm))
    } else {
        let violations: Vec<Violation> = answer
            .problems
            .into_iter()
            .map(|p| {
                Violation::new(
                    p.parameter,
                    "semantic",
                    if p.message.is_empty() {
                        "argument value is semantically unacceptable".to_string()
                    } else {
                        p.message
                    },
                )
            })
            .collect();
        if violations.is_empty() {
            Some(ValidationReport::semantic(vec![Violation::new(
                "",
                "semantic",
                "arguments are semantically unacceptable",
            )]))
        } else {
            Some(ValidationReport::semantic(violations))
        }
    }
}

/// The full pipeline: rules first with short-circuit, then the semantic
/// stage when enabled.
pub fn validate(
    call: &ToolCall,
    schema: &ToolSchema,
    context: &TaskContext,
    llm: &dyn LlmBackend,
    templates: &PromptTemplates,
    semantic_enabled: bool,
) -> Result<ValidationReport, LlmError> {
    let report = validate_syntactic(call, schema);
    if !report.is_pass() || !semantic_enabled {
        return Ok(report);
    }
    validate_semantic(call, schema, context, llm, templates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{AccessClass, ParameterSpec};
    use serde_json::json;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    fn spec(value_type: ParamType) -> ValueSpec {
        ValueSpec::new(value_type)
    }

    fn test_schema() -> ToolSchema {
        let mut amount = spec(ParamType::Number);
        amount.constraints = Some(ConstraintSet {
            minimum: Some(serde_json::Number::from(0)),
            maximum: Some(serde_json::Number::from(100)),
            ..ConstraintSet::default()
        });
        let mut mode = spec(ParamType::String);
        mode.constraints = Some(ConstraintSet {
            enum_values: Some(vec![json!("fast"), json!("slow")]),
            ..ConstraintSet::default()
        });
        let mut code = spec(ParamType::String);
        code.constraints = Some(ConstraintSet {
            min_length: Some(2),
            max_length: Some(4),
            pattern: Some("^[A-Z]+$".to_string()),
            ..ConstraintSet::default()
        });
        ToolSchema {
            tool_name: "transfer".into(),
            description: "move an amount".into(),
            parameters: vec![
                ParameterSpec {
                    name: "amount".into(),
                    required: true,
                    spec: amount,
                },
                ParameterSpec {
                    name: "mode".into(),
                    required: false,
                    spec: mode,
                },
                ParameterSpec {
                    name: "code".into(),
                    required: false,
                    spec: code,
                },
            ],
            response_schema: None,
            access_class: AccessClass::Write,
        }
    }

    fn call(args: Value) -> ToolCall {
        let Value::Object(arguments) = args else {
            panic!("args must be an object")
        };
        ToolCall {
            tool_name: "transfer".into(),
            arguments,
            call_id: "call-1".into(),
            session_id: "s1".into(),
        }
    }

    fn rules(report: &ValidationReport) -> Vec<&str> {
        report.violations.iter().map(|v| v.rule.as_str()).collect()
    }

    #[test]
    fn missing_required_parameter() {
        let report = validate_syntactic(&call(json!({})), &test_schema());
        assert_eq!(report.verdict, Verdict::SyntacticError);
        assert_eq!(report.stage, Stage::Rules);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].rule, "missing_required");
        assert_eq!(report.violations[0].parameter, "amount");
    }

    #[test]
    fn string_for_number_is_type_mismatch() {
        let report = validate_syntactic(&call(json!({"amount": "ten"})), &test_schema());
        assert_eq!(rules(&report), vec!["type_mismatch"]);
    }

    #[test]
    fn value_above_maximum_is_constraint_violation() {
        let report = validate_syntactic(&call(json!({"amount": 150})), &test_schema());
        assert_eq!(rules(&report), vec!["constraint.maximum"]);
    }

    #[test]
    fn value_below_minimum_is_constraint_violation() {
        let report = validate_syntactic(&call(json!({"amount": -3})), &test_schema());
        assert_eq!(rules(&report), vec!["constraint.minimum"]);
    }

    #[test]
    fn undeclared_parameter_is_flagged() {
        let report = validate_syntactic(&call(json!({"amount": 5, "tip": 1})), &test_schema());
        assert_eq!(rules(&report), vec!["unexpected_parameter"]);
    }

    #[test]
    fn enum_and_length_and_pattern_violations() {
        let report = validate_syntactic(
            &call(json!({"amount": 5, "mode": "medium", "code": "abcdef"})),
            &test_schema(),
        );
        let got = rules(&report);
        assert!(got.contains(&"constraint.enum"), "{got:?}");
        assert!(got.contains(&"constraint.max_length"), "{got:?}");
        assert!(got.contains(&"constraint.pattern"), "{got:?}");
    }

    #[test]
    fn integer_is_accepted_for_number_but_not_the_reverse() {
        let report = validate_syntactic(&call(json!({"amount": 7})), &test_schema());
        assert!(report.is_pass());

        let mut int_schema = test_schema();
        int_schema.parameters[0].spec = spec(ParamType::Integer);
        let report = validate_syntactic(&call(json!({"amount": 7.5})), &int_schema);
        assert_eq!(rules(&report), vec!["type_mismatch"]);
    }

    #[test]
    fn all_failures_are_enumerated() {
        let report = validate_syntactic(
            &call(json!({"mode": 3, "tip": true})),
            &test_schema(),
        );
        // missing amount, wrong type for mode, unexpected tip
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn nested_object_and_array_paths() {
        let mut address = spec(ParamType::Object);
        let mut props = std::collections::BTreeMap::new();
        props.insert("city".to_string(), spec(ParamType::String));
        address.properties = Some(props);
        address.required = Some(vec!["city".to_string()]);

        let mut tags = spec(ParamType::Array);
        tags.items = Some(Box::new(spec(ParamType::String)));

        let schema = ToolSchema {
            tool_name: "t".into(),
            description: String::new(),
            parameters: vec![
                ParameterSpec {
                    name: "address".into(),
                    required: true,
                    spec: address,
                },
                ParameterSpec {
                    name: "tags".into(),
                    required: false,
                    spec: tags,
                },
            ],
            response_schema: None,
            access_class: AccessClass::Write,
        };

        let report = validate_syntactic(
            &ToolCall::new(
                "t",
                json!({"address": {"zip": "98101"}, "tags": ["a", 3]})
                    .as_object()
                    .unwrap()
                    .clone(),
            ),
            &schema,
        );
        let params: Vec<&str> = report
            .violations
            .iter()
            .map(|v| v.parameter.as_str())
            .collect();
        assert!(params.contains(&"address.city"), "{params:?}");
        assert!(params.contains(&"address.zip"), "{params:?}");
        assert!(params.contains(&"tags[1]"), "{params:?}");
    }

    struct CountingBackend {
        calls: AtomicUsize,
        answers: Mutex<Vec<String>>,
    }

    impl CountingBackend {
        fn new(answers: Vec<&str>) -> Self {
            CountingBackend {
                calls: AtomicUsize::new(0),
                answers: Mutex::new(answers.into_iter().rev().map(String::from).collect()),
            }
        }

        fn call_count(&self) -> usize {
            self.calls.load(Ordering::SeqCst)
        }
    }

    impl LlmBackend for CountingBackend {
        fn complete(&self, _req: &LlmRequest) -> Result<String, LlmError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            Ok(self
                .answers
                .lock()
                .unwrap()
                .pop()
                .unwrap_or_else(|| r#"{"acceptable": true}"#.to_string()))
        }
    }

    #[test]
    fn syntactic_failure_short_circuits_the_llm() {
        let backend = CountingBackend::new(vec![]);
        let report = validate(
            &call(json!({})),
            &test_schema(),
            &TaskContext::default(),
            &backend,
            &PromptTemplates::builtin(),
            true,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::SyntacticError);
        assert_eq!(backend.call_count(), 0);
    }

    #[test]
    fn semantic_rejection_carries_llm_stage() {
        let backend = CountingBackend::new(vec![
            r#"{"acceptable": false, "problems": [{"parameter": "code", "message": "not a country"}]}"#,
        ]);
        let report = validate(
            &call(json!({"amount": 5, "code": "AB"})),
            &test_schema(),
            &TaskContext::default(),
            &backend,
            &PromptTemplates::builtin(),
            true,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::SemanticError);
        assert_eq!(report.stage, Stage::Llm);
        assert_eq!(report.violations[0].rule, "semantic");
        assert_eq!(backend.call_count(), 1);
    }

    #[test]
    fn semantic_stage_skippable_by_flag() {
        let backend = CountingBackend::new(vec![]);
        let report = validate(
            &call(json!({"amount": 5})),
            &test_schema(),
            &TaskContext::default(),
            &backend,
            &PromptTemplates::builtin(),
            false,
        )
        .unwrap();
        assert!(report.is_pass());
        assert_eq!(backend.call_count(), 0);
    }

    #[test]
    fn unparseable_semantic_answer_reasks_then_passes() {
        let backend = CountingBackend::new(vec!["not json at all", "still not json"]);
        let report = validate(
            &call(json!({"amount": 5})),
            &test_schema(),
            &TaskContext::default(),
            &backend,
            &PromptTemplates::builtin(),
            true,
        )
        .unwrap();
        assert!(report.is_pass());
        assert_eq!(report.stage, Stage::Llm);
        assert_eq!(backend.call_count(), 2);
    }

    #[test]
    fn fenced_json_answers_are_accepted() {
        let backend = CountingBackend::new(vec![
            "```json\n{\"acceptable\": false, \"problems\": [{\"parameter\": \"amount\", \"message\": \"implausible\"}]}\n```",
        ]);
        let report = validate(
            &call(json!({"amount": 5})),
            &test_schema(),
            &TaskContext::default(),
            &backend,
            &PromptTemplates::builtin(),
            true,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::SemanticError);
    }
}
