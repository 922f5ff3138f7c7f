//! Document-level parsing and structural validation.
//!
//! A single walker both collects violations and builds the `ToolSchema`,
//! so `validate_schema_document` accepts exactly the set of documents
//! `parse_schema` accepts. Constraint type-compatibility is enforced here,
//! never deferred to call time.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use super::{
    AccessClass, ConstraintSet, ParamType, ParameterSpec, SchemaError, SchemaErrorKind,
    SchemaViolation, ToolSchema, ValidityVerdict, ValueSpec,
};

const OPERATION_METHODS: [&str; 5] = ["get", "post", "put", "delete", "patch"];
const ACCESS_CLASS_KEY: &str = "x-access-class";

/// Parses an OpenAPI 3.1.0 JSON document into a `ToolSchema`, failing on
/// the first defect found.
pub fn parse_schema(document: &str) -> Result<ToolSchema, SchemaError> {
    let (violations, schema) = analyze_text(document);
    match schema {
        Some(schema) => Ok(schema),
        None => Err(violations
            .into_iter()
            .next()
            .unwrap_or_else(|| {
                SchemaError::new(SchemaErrorKind::InvalidStructure, "", "unparseable document")
            })),
    }
}

/// Checks a document and reports every violation, not just the first.
/// The verdict is valid exactly when `parse_schema` would succeed.
pub fn validate_schema_document(document: &str) -> ValidityVerdict {
    let (violations, schema) = analyze_text(document);
    if schema.is_some() {
        ValidityVerdict::valid()
    } else {
        ValidityVerdict::invalid(violations)
    }
}

fn analyze_text(document: &str) -> (Vec<SchemaViolation>, Option<ToolSchema>) {
    let doc: Value = match serde_json::from_str(document) {
        Ok(doc) => doc,
        Err(err) => {
            return (
                vec![SchemaError::new(
                    SchemaErrorKind::MalformedJson,
                    "",
                    err.to_string(),
                )],
                None,
            );
        }
    };
    analyze(&doc)
}

fn analyze(doc: &Value) -> (Vec<SchemaViolation>, Option<ToolSchema>) {
    let mut walker = Walker::default();
    let schema = walker.document(doc);
    if walker.violations.is_empty() {
        (walker.violations, schema)
    } else {
        (walker.violations, None)
    }
}

#[derive(Default)]
struct Walker {
    violations: Vec<SchemaViolation>,
}

impl Walker {
    fn flag(&mut self, kind: SchemaErrorKind, path: &str, message: impl Into<String>) {
        self.violations.push(SchemaError::new(kind, path, message));
    }

    fn document(&mut self, doc: &Value) -> Option<ToolSchema> {
        let root = match doc.as_object() {
            Some(root) => root,
            None => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    "",
                    "document root must be a JSON object",
                );
                return None;
            }
        };

        match root.get("openapi") {
            Some(Value::String(version)) if version.starts_with("3.1") => {}
            Some(Value::String(version)) => self.flag(
                SchemaErrorKind::InvalidStructure,
                "openapi",
                format!("unsupported OpenAPI version `{version}`, expected 3.1.x"),
            ),
            Some(_) => self.flag(
                SchemaErrorKind::InvalidStructure,
                "openapi",
                "`openapi` must be a string",
            ),
            None => self.flag(
                SchemaErrorKind::MissingField,
                "openapi",
                "document is missing the `openapi` version field",
            ),
        }

        let paths = match root.get("paths").and_then(Value::as_object) {
            Some(paths) if !paths.is_empty() => paths,
            _ => {
                self.flag(
                    SchemaErrorKind::MissingOperation,
                    "paths",
                    "document declares no paths",
                );
                return None;
            }
        };
        if paths.len() > 1 {
            self.flag(
                SchemaErrorKind::InvalidStructure,
                "paths",
                format!("expected exactly one path per tool, found {}", paths.len()),
            );
            return None;
        }
        let (path_key, path_item) = paths.iter().next().expect("non-empty paths");
        let path_loc = format!("paths.{path_key}");

        let item = match path_item.as_object() {
            Some(item) => item,
            None => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &path_loc,
                    "path item must be an object",
                );
                return None;
            }
        };
        let methods: Vec<&str> = OPERATION_METHODS
            .iter()
            .copied()
            .filter(|m| item.contains_key(*m))
            .collect();
        match methods.len() {
            0 => {
                self.flag(
                    SchemaErrorKind::MissingOperation,
                    &path_loc,
                    "path item declares no operation",
                );
                return None;
            }
            1 => {}
            n => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &path_loc,
                    format!("expected exactly one operation per tool, found {n}"),
                );
                return None;
            }
        }
        let method = methods[0];
        let op_loc = format!("{path_loc}.{method}");
        let op = match item.get(method).and_then(Value::as_object) {
            Some(op) => op,
            None => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &op_loc,
                    "operation must be an object",
                );
                return None;
            }
        };
        self.operation(op, &op_loc)
    }

    fn operation(&mut self, op: &Map<String, Value>, loc: &str) -> Option<ToolSchema> {
        let tool_name = match op.get("operationId") {
            Some(Value::String(id)) if is_valid_tool_name(id) => id.clone(),
            Some(Value::String(id)) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.operationId"),
                    format!("`{id}` is not a valid tool identifier"),
                );
                String::new()
            }
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.operationId"),
                    "`operationId` must be a string",
                );
                String::new()
            }
            None => {
                self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    "operation is missing `operationId`",
                );
                String::new()
            }
        };

        let description = match op.get("description") {
            Some(Value::String(text)) => text.clone(),
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.description"),
                    "`description` must be a string",
                );
                String::new()
            }
            None => String::new(),
        };

        let mut parameters: Vec<ParameterSpec> = Vec::new();
        let mut seen_names: BTreeSet<String> = BTreeSet::new();

        if let Some(listed) = op.get("parameters") {
            let list_loc = format!("{loc}.parameters");
            match listed.as_array() {
                Some(entries) => {
                    for (idx, entry) in entries.iter().enumerate() {
                        let entry_loc = format!("{list_loc}.{idx}");
                        if let Some(param) = self.listed_parameter(entry, &entry_loc) {
                            if !seen_names.insert(param.name.clone()) {
                                self.flag(
                                    SchemaErrorKind::DuplicateParameter,
                                    &entry_loc,
                                    format!("parameter `{}` declared more than once", param.name),
                                );
                            } else {
                                parameters.push(param);
                            }
                        }
                    }
                }
                None => self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &list_loc,
                    "`parameters` must be an array",
                ),
            }
        }

        if let Some(body) = op.get("requestBody") {
            let body_loc = format!("{loc}.requestBody");
            self.request_body(body, &body_loc, &mut parameters, &mut seen_names);
        }

        let response_schema = self.response_schema(op, loc);
        let access_class = self.access_class(op, loc);

        // Canonical parameter order is lexicographic by name.
        parameters.sort_by(|a, b| a.name.cmp(&b.name));

        if self.violations.is_empty() {
            Some(ToolSchema {
                tool_name,
                description,
                parameters,
                response_schema,
                access_class,
            })
        } else {
            None
        }
    }

    fn listed_parameter(&mut self, entry: &Value, loc: &str) -> Option<ParameterSpec> {
        let entry = match entry.as_object() {
            Some(entry) => entry,
            None => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    loc,
                    "parameter entry must be an object",
                );
                return None;
            }
        };
        let name = match entry.get("name") {
            Some(Value::String(name)) if !name.is_empty() => name.clone(),
            Some(Value::String(_)) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.name"),
                    "parameter name must be non-empty",
                );
                return None;
            }
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.name"),
                    "parameter name must be a string",
                );
                return None;
            }
            None => {
                self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    "parameter entry is missing `name`",
                );
                return None;
            }
        };
        let required = match entry.get("required") {
            Some(Value::Bool(flag)) => *flag,
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.required"),
                    "`required` must be a boolean",
                );
                false
            }
            None => false,
        };
        let mut spec = match entry.get("schema") {
            Some(schema) => self.value_spec(schema, &format!("{loc}.schema"))?,
            None => {
                self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    format!("parameter `{name}` is missing `schema`"),
                );
                return None;
            }
        };
        if let Some(Value::String(text)) = entry.get("description") {
            if spec.description.is_none() {
                spec.description = Some(text.clone());
            }
        }
        Some(ParameterSpec {
            name,
            required,
            spec,
        })
    }

    fn request_body(
        &mut self,
        body: &Value,
        loc: &str,
        parameters: &mut Vec<ParameterSpec>,
        seen_names: &mut BTreeSet<String>,
    ) {
        let schema = match body
            .as_object()
            .and_then(|b| b.get("content"))
            .and_then(Value::as_object)
            .and_then(|c| c.get("application/json"))
            .and_then(Value::as_object)
            .and_then(|m| m.get("schema"))
        {
            Some(schema) => schema,
            None => {
                self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    "request body must carry content.application/json.schema",
                );
                return;
            }
        };
        let schema_loc = format!("{loc}.schema");
        let Some(spec) = self.value_spec(schema, &schema_loc) else {
            return;
        };
        if spec.value_type != ParamType::Object {
            self.flag(
                SchemaErrorKind::InvalidStructure,
                &schema_loc,
                "request body schema must declare type `object`",
            );
            return;
        }
        let required: BTreeSet<String> = spec.required.clone().unwrap_or_default().into_iter().collect();
        for (name, field_spec) in spec.properties.unwrap_or_default() {
            if !seen_names.insert(name.clone()) {
                self.flag(
                    SchemaErrorKind::DuplicateParameter,
                    &format!("{schema_loc}.properties.{name}"),
                    format!("parameter `{name}` declared more than once"),
                );
                continue;
            }
            let is_required = required.contains(&name);
            parameters.push(ParameterSpec {
                name,
                required: is_required,
                spec: field_spec,
            });
        }
    }

    fn response_schema(&mut self, op: &Map<String, Value>, loc: &str) -> Option<ValueSpec> {
        let responses = op.get("responses")?.as_object().or_else(|| {
            self.flag(
                SchemaErrorKind::InvalidStructure,
                &format!("{loc}.responses"),
                "`responses` must be an object",
            );
            None
        })?;
        let ok = responses.get("200")?;
        let schema = ok
            .as_object()
            .and_then(|r| r.get("content"))
            .and_then(Value::as_object)
            .and_then(|c| c.get("application/json"))
            .and_then(Value::as_object)
            .and_then(|m| m.get("schema"))?;
        self.value_spec(schema, &format!("{loc}.responses.200.schema"))
    }

    fn access_class(&mut self, op: &Map<String, Value>, loc: &str) -> AccessClass {
        match op.get(ACCESS_CLASS_KEY) {
            Some(Value::String(s)) if s == "read_only" => AccessClass::ReadOnly,
            Some(Value::String(s)) if s == "write" => AccessClass::Write,
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.{ACCESS_CLASS_KEY}"),
                    "access class must be `read_only` or `write`",
                );
                AccessClass::Write
            }
            None => AccessClass::Write,
        }
    }

    fn value_spec(&mut self, node: &Value, loc: &str) -> Option<ValueSpec> {
        let map = match node.as_object() {
            Some(map) => map,
            None => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    loc,
                    "schema node must be an object",
                );
                return None;
            }
        };

        let value_type = match map.get("type") {
            Some(Value::String(name)) => match ParamType::from_str(name) {
                Some(t) => t,
                None => {
                    self.flag(
                        SchemaErrorKind::UnknownType,
                        &format!("{loc}.type"),
                        format!("`{name}` is not a supported type"),
                    );
                    return None;
                }
            },
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.type"),
                    "`type` must be a string",
                );
                return None;
            }
            None => {
                self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    "schema node is missing `type`",
                );
                return None;
            }
        };

        let description = match map.get("description") {
            Some(Value::String(text)) => Some(text.clone()),
            Some(_) => {
                self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &format!("{loc}.description"),
                    "`description` must be a string",
                );
                None
            }
            None => None,
        };

        let constraints = self.constraints(map, value_type, loc);

        let mut spec = ValueSpec::new(value_type);
        spec.description = description;
        spec.constraints = constraints;

        match value_type {
            ParamType::Array => match map.get("items") {
                Some(items) => {
                    spec.items = self
                        .value_spec(items, &format!("{loc}.items"))
                        .map(Box::new);
                }
                None => self.flag(
                    SchemaErrorKind::MissingField,
                    loc,
                    "array schema is missing `items`",
                ),
            },
            ParamType::Object => {
                let mut properties = BTreeMap::new();
                let mut declared: BTreeSet<String> = BTreeSet::new();
                match map.get("properties") {
                    Some(Value::Object(props)) => {
                        for (name, child) in props {
                            if name.is_empty() {
                                self.flag(
                                    SchemaErrorKind::InvalidStructure,
                                    &format!("{loc}.properties"),
                                    "property name must be non-empty",
                                );
                                continue;
                            }
                            declared.insert(name.clone());
                            if let Some(child_spec) =
                                self.value_spec(child, &format!("{loc}.properties.{name}"))
                            {
                                properties.insert(name.clone(), child_spec);
                            }
                        }
                    }
                    Some(_) => self.flag(
                        SchemaErrorKind::InvalidStructure,
                        &format!("{loc}.properties"),
                        "`properties` must be an object",
                    ),
                    None => {}
                }
                let mut required_names: Vec<String> = Vec::new();
                match map.get("required") {
                    Some(Value::Array(entries)) => {
                        let req_loc = format!("{loc}.required");
                        for entry in entries {
                            match entry.as_str() {
                                Some(name) => {
                                    if !declared.contains(name) {
                                        self.flag(
                                            SchemaErrorKind::InvalidStructure,
                                            &req_loc,
                                            format!("required field `{name}` is not declared"),
                                        );
                                    } else if required_names.iter().any(|n| n == name) {
                                        self.flag(
                                            SchemaErrorKind::InvalidStructure,
                                            &req_loc,
                                            format!("required field `{name}` listed twice"),
                                        );
                                    } else {
                                        required_names.push(name.to_string());
                                    }
                                }
                                None => self.flag(
                                    SchemaErrorKind::InvalidStructure,
                                    &req_loc,
                                    "`required` entries must be strings",
                                ),
                            }
                        }
                    }
                    Some(_) => self.flag(
                        SchemaErrorKind::InvalidStructure,
                        &format!("{loc}.required"),
                        "`required` must be an array",
                    ),
                    None => {}
                }
                spec.properties = Some(properties);
                if !required_names.is_empty() {
                    required_names.sort();
                    spec.required = Some(required_names);
                }
            }
            _ => {
                if map.contains_key("items") {
                    self.flag(
                        SchemaErrorKind::InconsistentConstraints,
                        &format!("{loc}.items"),
                        "`items` is only valid on array types",
                    );
                }
                if map.contains_key("properties") {
                    self.flag(
                        SchemaErrorKind::InconsistentConstraints,
                        &format!("{loc}.properties"),
                        "`properties` is only valid on object types",
                    );
                }
            }
        }

        Some(spec)
    }

    fn constraints(
        &mut self,
        map: &Map<String, Value>,
        value_type: ParamType,
        loc: &str,
    ) -> Option<ConstraintSet> {
        let mut set = ConstraintSet::default();

        for key in ["minimum", "maximum"] {
            if let Some(bound) = map.get(key) {
                let bound_loc = format!("{loc}.{key}");
                match bound.as_number() {
                    Some(n) => {
                        if !value_type.is_numeric() {
                            self.flag(
                                SchemaErrorKind::InconsistentConstraints,
                                &bound_loc,
                                format!("`{key}` is only valid on integer/number types"),
                            );
                        } else if key == "minimum" {
                            set.minimum = Some(n.clone());
                        } else {
                            set.maximum = Some(n.clone());
                        }
                    }
                    None => self.flag(
                        SchemaErrorKind::InvalidStructure,
                        &bound_loc,
                        format!("`{key}` must be a number"),
                    ),
                }
            }
        }
        if let (Some(min), Some(max)) = (&set.minimum, &set.maximum) {
            if min.as_f64().unwrap_or(f64::NEG_INFINITY) > max.as_f64().unwrap_or(f64::INFINITY) {
                self.flag(
                    SchemaErrorKind::InconsistentConstraints,
                    loc,
                    format!("minimum {min} exceeds maximum {max}"),
                );
            }
        }

        if let Some(values) = map.get("enum") {
            let enum_loc = format!("{loc}.enum");
            match values.as_array() {
                Some(entries) if entries.is_empty() => self.flag(
                    SchemaErrorKind::InconsistentConstraints,
                    &enum_loc,
                    "`enum` must be non-empty",
                ),
                Some(entries) => {
                    if matches!(value_type, ParamType::Array | ParamType::Object) {
                        self.flag(
                            SchemaErrorKind::InconsistentConstraints,
                            &enum_loc,
                            "`enum` is only valid on primitive types",
                        );
                    } else {
                        for (idx, entry) in entries.iter().enumerate() {
                            if !enum_value_matches(entry, value_type) {
                                self.flag(
                                    SchemaErrorKind::InconsistentConstraints,
                                    &format!("{enum_loc}.{idx}"),
                                    format!(
                                        "enum value {entry} does not match declared type `{value_type}`"
                                    ),
                                );
                            }
                        }
                        set.enum_values = Some(entries.clone());
                    }
                }
                None => self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &enum_loc,
                    "`enum` must be an array",
                ),
            }
        }

        for key in ["minLength", "maxLength"] {
            if let Some(len) = map.get(key) {
                let len_loc = format!("{loc}.{key}");
                match len.as_u64() {
                    Some(n) => {
                        if value_type != ParamType::String {
                            self.flag(
                                SchemaErrorKind::InconsistentConstraints,
                                &len_loc,
                                format!("`{key}` is only valid on string types"),
                            );
                        } else if key == "minLength" {
                            set.min_length = Some(n);
                        } else {
                            set.max_length = Some(n);
                        }
                    }
                    None => self.flag(
                        SchemaErrorKind::InvalidStructure,
                        &len_loc,
                        format!("`{key}` must be a non-negative integer"),
                    ),
                }
            }
        }
        if let (Some(min), Some(max)) = (set.min_length, set.max_length) {
            if min > max {
                self.flag(
                    SchemaErrorKind::InconsistentConstraints,
                    loc,
                    format!("minLength {min} exceeds maxLength {max}"),
                );
            }
        }

        if let Some(pattern) = map.get("pattern") {
            let pat_loc = format!("{loc}.pattern");
            match pattern.as_str() {
                Some(source) => {
                    if value_type != ParamType::String {
                        self.flag(
                            SchemaErrorKind::InconsistentConstraints,
                            &pat_loc,
                            "`pattern` is only valid on string types",
                        );
                    } else if let Err(err) = regex::Regex::new(source) {
                        self.flag(
                            SchemaErrorKind::InconsistentConstraints,
                            &pat_loc,
                            format!("pattern does not compile: {err}"),
                        );
                    } else {
                        set.pattern = Some(source.to_string());
                    }
                }
                None => self.flag(
                    SchemaErrorKind::InvalidStructure,
                    &pat_loc,
                    "`pattern` must be a string",
                ),
            }
        }

        if set.is_empty() {
            None
        } else {
            Some(set)
        }
    }
}

fn enum_value_matches(value: &Value, declared: ParamType) -> bool {
    match declared {
        ParamType::Integer => value.as_i64().is_some() || value.as_u64().is_some(),
        ParamType::Number => value.is_number(),
        ParamType::String => value.is_string(),
        ParamType::Boolean => value.is_boolean(),
        ParamType::Array | ParamType::Object => false,
    }
}

fn is_valid_tool_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Canonical serialization: request-body form, lexicographically sorted
/// object keys, no insignificant whitespace.
pub fn serialize_schema(schema: &ToolSchema) -> String {
    serde_json::to_string(&schema_document(schema)).expect("schema document serializes")
}

fn schema_document(schema: &ToolSchema) -> Value {
    let mut properties = Map::new();
    let mut required: Vec<Value> = Vec::new();
    for param in &schema.parameters {
        properties.insert(param.name.clone(), value_spec_node(&param.spec));
        if param.required {
            required.push(Value::String(param.name.clone()));
        }
    }

    let mut body_schema = Map::new();
    body_schema.insert("additionalProperties".into(), Value::Bool(false));
    body_schema.insert("properties".into(), Value::Object(properties));
    if !required.is_empty() {
        body_schema.insert("required".into(), Value::Array(required));
    }
    body_schema.insert("type".into(), Value::String("object".into()));

    let mut ok_response = Map::new();
    if let Some(resp) = &schema.response_schema {
        ok_response.insert(
            "content".into(),
            json!({ "application/json": { "schema": value_spec_node(resp) } }),
        );
    }
    ok_response.insert(
        "description".into(),
        Value::String("Tool execution result.".into()),
    );

    json!({
        "info": { "title": schema.tool_name, "version": "1.0.0" },
        "openapi": "3.1.0",
        "paths": {
            format!("/{}", schema.tool_name): {
                "post": {
                    "description": schema.description,
                    "operationId": schema.tool_name,
                    "requestBody": {
                        "content": { "application/json": { "schema": Value::Object(body_schema) } },
                        "required": true
                    },
                    "responses": { "200": Value::Object(ok_response) },
                    ACCESS_CLASS_KEY: schema.access_class.as_str()
                }
            }
        }
    })
}

/// Renders a value spec back into its schema-node JSON form (the shape
/// used inside documents), e.g. for embedding in prompts.
pub fn value_spec_json(spec: &ValueSpec) -> Value {
    value_spec_node(spec)
}

fn value_spec_node(spec: &ValueSpec) -> Value {
    let mut node = Map::new();
    if let Some(text) = &spec.description {
        node.insert("description".into(), Value::String(text.clone()));
    }
    if let Some(constraints) = &spec.constraints {
        if let Some(min) = &constraints.minimum {
            node.insert("minimum".into(), Value::Number(min.clone()));
        }
        if let Some(max) = &constraints.maximum {
            node.insert("maximum".into(), Value::Number(max.clone()));
        }
        if let Some(values) = &constraints.enum_values {
            node.insert("enum".into(), Value::Array(values.clone()));
        }
        if let Some(min) = constraints.min_length {
            node.insert("minLength".into(), Value::from(min));
        }
        if let Some(max) = constraints.max_length {
            node.insert("maxLength".into(), Value::from(max));
        }
        if let Some(pattern) = &constraints.pattern {
            node.insert("pattern".into(), Value::String(pattern.clone()));
        }
    }
    match spec.value_type {
        ParamType::Array => {
            if let Some(items) = &spec.items {
                node.insert("items".into(), value_spec_node(items));
            }
        }
        ParamType::Object => {
            let mut props = Map::new();
            if let Some(properties) = &spec.properties {
                for (name, child) in properties {
                    props.insert(name.clone(), value_spec_node(child));
                }
            }
            node.insert("properties".into(), Value::Object(props));
            if let Some(required) = &spec.required {
                if !required.is_empty() {
                    node.insert(
                        "required".into(),
                        Value::Array(required.iter().map(|n| Value::String(n.clone())).collect()),
                    );
                }
            }
        }
        _ => {}
    }
    node.insert("type".into(), Value::String(spec.value_type.as_str().into()));
    Value::Object(node)
}
