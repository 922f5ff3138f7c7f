//! Simulated tool-execution environment: tool calls are validated against
//! OpenAPI schemas, executed against LLM-backed simulators inside isolated
//! sessions, and judged against task checklists, with snapshot/restore so
//! refinement retries restart from identical state.

pub mod llm;
pub mod prompt;
pub mod schema;
pub mod validate;

pub use schema::{
    AccessClass, ConstraintSet, ParamType, ParameterSpec, SchemaError, SchemaErrorKind,
    ToolRegistry, ToolSchema, ValidityVerdict, ValueSpec,
};
pub use validate::{Stage, TaskContext, ToolCall, ValidationReport, Verdict, Violation};
