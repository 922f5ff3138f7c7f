//! OpenAPI 3.1.0 tool schemas: parsing, structural validation, canonical
//! serialization, and the registry that maps tool names to their schemas.
//!
//! Only the subset needed for tool simulation is supported: one operation
//! per tool, JSON request/response bodies, and the six JSON types
//! (`integer`, `number`, `string`, `boolean`, `array`, `object`).

mod parse;

pub use parse::{parse_schema, serialize_schema, validate_schema_document, value_spec_json};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Whether a tool only queries state or may take impactful actions.
/// Routing in hybrid mode sends `read_only` tools to real endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessClass {
    ReadOnly,
    Write,
}

impl AccessClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AccessClass::ReadOnly => "read_only",
            AccessClass::Write => "write",
        }
    }
}

/// The closed set of JSON types a parameter or response field may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    Integer,
    Number,
    String,
    Boolean,
    Array,
    Object,
}

impl ParamType {
    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "integer" => Some(ParamType::Integer),
            "number" => Some(ParamType::Number),
            "string" => Some(ParamType::String),
            "boolean" => Some(ParamType::Boolean),
            "array" => Some(ParamType::Array),
            "object" => Some(ParamType::Object),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ParamType::Integer => "integer",
            ParamType::Number => "number",
            ParamType::String => "string",
            ParamType::Boolean => "boolean",
            ParamType::Array => "array",
            ParamType::Object => "object",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ParamType::Integer | ParamType::Number)
    }
}

impl fmt::Display for ParamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Value constraints attached to a parameter: numeric bounds, enumeration,
/// and length/pattern restrictions for strings.
///
/// Bounds keep their original JSON number form so canonical serialization
/// echoes the source document byte for byte.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintSet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum: Option<serde_json::Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximum: Option<serde_json::Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_length: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_length: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.minimum.is_none()
            && self.maximum.is_none()
            && self.enum_values.is_none()
            && self.min_length.is_none()
            && self.max_length.is_none()
            && self.pattern.is_none()
    }
}

/// Structural type of a JSON value: the declared type plus constraints and,
/// for arrays/objects, the nested element/property specs. Nesting is
/// validated one level per step, recursively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSpec {
    #[serde(rename = "type")]
    pub value_type: ParamType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSet>,
    /// Element spec when `value_type` is `array`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub items: Option<Box<ValueSpec>>,
    /// Named field specs when `value_type` is `object`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<BTreeMap<String, ValueSpec>>,
    /// Required field names when `value_type` is `object`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required: Option<Vec<String>>,
}

impl ValueSpec {
    pub fn new(value_type: ParamType) -> Self {
        ValueSpec {
            value_type,
            description: None,
            constraints: None,
            items: None,
            properties: None,
            required: None,
        }
    }
}

/// One named input of a tool operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    pub required: bool,
    pub spec: ValueSpec,
}

impl ParameterSpec {
    pub fn param_type(&self) -> ParamType {
        self.spec.value_type
    }

    pub fn constraints(&self) -> Option<&ConstraintSet> {
        self.spec.constraints.as_ref()
    }

    pub fn description(&self) -> &str {
        self.spec.description.as_deref().unwrap_or("")
    }
}

/// A parsed OpenAPI operation describing one simulated tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub tool_name: String,
    pub description: String,
    pub parameters: Vec<ParameterSpec>,
    /// Structural type of the tool's output; `None` for void-style
    /// acknowledgments with no declared body.
    pub response_schema: Option<ValueSpec>,
    pub access_class: AccessClass,
}

impl ToolSchema {
    pub fn parameter(&self, name: &str) -> Option<&ParameterSpec> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// Classification of a schema defect, shared by parse errors and validity
/// verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaErrorKind {
    MalformedJson,
    MissingOperation,
    InconsistentConstraints,
    DuplicateParameter,
    UnknownType,
    MissingField,
    InvalidStructure,
    DuplicateName,
}

impl SchemaErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemaErrorKind::MalformedJson => "malformed_json",
            SchemaErrorKind::MissingOperation => "missing_operation",
            SchemaErrorKind::InconsistentConstraints => "inconsistent_constraints",
            SchemaErrorKind::DuplicateParameter => "duplicate_parameter",
            SchemaErrorKind::UnknownType => "unknown_type",
            SchemaErrorKind::MissingField => "missing_field",
            SchemaErrorKind::InvalidStructure => "invalid_structure",
            SchemaErrorKind::DuplicateName => "duplicate_name",
        }
    }
}

/// A schema defect with the JSON-pointer-style path of the offending node.
#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize, Deserialize)]
#[error("{} at `{path}`: {message}", kind.as_str())]
pub struct SchemaError {
    pub kind: SchemaErrorKind,
    pub path: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(kind: SchemaErrorKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            kind,
            path: path.into(),
            message: message.into(),
        }
    }
}

/// One violation found while checking a schema document.
pub type SchemaViolation = SchemaError;

/// Outcome of `validate_schema_document`: valid, or every violation found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityVerdict {
    pub valid: bool,
    pub violations: Vec<SchemaViolation>,
}

impl ValidityVerdict {
    pub fn valid() -> Self {
        ValidityVerdict {
            valid: true,
            violations: Vec::new(),
        }
    }

    pub fn invalid(violations: Vec<SchemaViolation>) -> Self {
        ValidityVerdict {
            valid: false,
            violations,
        }
    }
}

/// Provenance of a registered schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceRecord {
    pub tool_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// Map from tool name to schema. Registration happens during a load phase;
/// afterwards the registry is shared immutably across request handlers.
#[derive(Debug, Default)]
pub struct ToolRegistry {
    schemas: BTreeMap<String, Arc<ToolSchema>>,
    sources: Vec<SourceRecord>,
}

impl ToolRegistry {
    pub fn new() -> Self {
        ToolRegistry::default()
    }

    /// Registers a schema under its tool name. Rejects duplicates.
    pub fn register(&mut self, schema: ToolSchema) -> Result<(), SchemaError> {
        self.register_with_source(schema, None)
    }

    pub fn register_with_source(
        &mut self,
        schema: ToolSchema,
        path: Option<String>,
    ) -> Result<(), SchemaError> {
        if self.schemas.contains_key(&schema.tool_name) {
            return Err(SchemaError::new(
                SchemaErrorKind::DuplicateName,
                format!("/{}", schema.tool_name),
                format!("tool `{}` is already registered", schema.tool_name),
            ));
        }
        self.sources.push(SourceRecord {
            tool_name: schema.tool_name.clone(),
            path,
        });
        self.schemas.insert(schema.tool_name.clone(), Arc::new(schema));
        Ok(())
    }

    pub fn lookup(&self, tool_name: &str) -> Option<Arc<ToolSchema>> {
        self.schemas.get(tool_name).cloned()
    }

    pub fn contains(&self, tool_name: &str) -> bool {
        self.schemas.contains_key(tool_name)
    }

    pub fn len(&self) -> usize {
        self.schemas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemas.is_empty()
    }

    pub fn tool_names(&self) -> impl Iterator<Item = &str> {
        self.schemas.keys().map(String::as_str)
    }

    pub fn schemas(&self) -> impl Iterator<Item = &Arc<ToolSchema>> {
        self.schemas.values()
    }

    pub fn sources(&self) -> &[SourceRecord] {
        &self.sources
    }
}
