//! Prompt templates for the helper/judge roles. Built-in templates are
//! compiled into the binary; a template directory can override any of them
//! per deployment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::llm::LlmRole;

const BUILTIN: [(LlmRole, &str); 7] = [
    (
        LlmRole::SemanticValidator,
        include_str!("../templates/semantic_validator.txt"),
    ),
    (
        LlmRole::ResponseGenerator,
        include_str!("../templates/response_generator.txt"),
    ),
    (
        LlmRole::StateBootstrapper,
        include_str!("../templates/state_bootstrapper.txt"),
    ),
    (
        LlmRole::StateUpdater,
        include_str!("../templates/state_updater.txt"),
    ),
    (LlmRole::Checklist, include_str!("../templates/checklist.txt")),
    (LlmRole::Judge, include_str!("../templates/judge.txt")),
    (
        LlmRole::SchemaConverter,
        include_str!("../templates/schema_converter.txt"),
    ),
];

#[derive(Debug, Clone)]
pub struct PromptTemplates {
    templates: BTreeMap<LlmRole, String>,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates::builtin()
    }
}

impl PromptTemplates {
    pub fn builtin() -> Self {
        PromptTemplates {
            templates: BUILTIN
                .iter()
                .map(|(role, text)| (*role, text.to_string()))
                .collect(),
        }
    }

    /// Builtin templates with overrides loaded from `<dir>/<role>.txt`.
    pub fn with_overrides(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let mut set = PromptTemplates::builtin();
        for role in LlmRole::ALL {
            let path = dir.as_ref().join(format!("{}.txt", role.as_str()));
            if path.exists() {
                set.templates.insert(role, std::fs::read_to_string(&path)?);
            }
        }
        Ok(set)
    }

    pub fn template(&self, role: LlmRole) -> &str {
        self.templates
            .get(&role)
            .map(String::as_str)
            .unwrap_or_default()
    }

    /// Substitutes every `{{key}}` placeholder; unknown placeholders are
    /// left in place so a malformed override is visible in the prompt.
    pub fn render(&self, role: LlmRole, vars: &[(&str, &str)]) -> String {
        let mut text = self.template(role).to_string();
        for (key, value) in vars {
            text = text.replace(&format!("{{{{{key}}}}}"), value);
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_role_has_a_builtin_template() {
        let templates = PromptTemplates::builtin();
        for role in LlmRole::ALL {
            assert!(
                !templates.template(role).is_empty(),
                "missing template for {role:?}"
            );
        }
    }

    #[test]
    fn render_substitutes_placeholders() {
        let templates = PromptTemplates::builtin();
        let text = templates.render(
            LlmRole::StateUpdater,
            &[("state", "apples: 3"), ("call", "{}"), ("response", "{}")],
        );
        assert!(text.contains("apples: 3"));
        assert!(!text.contains("{{state}}"));
    }

    #[test]
    fn overrides_take_precedence() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("judge.txt"), "custom {{task}}").unwrap();
        let templates = PromptTemplates::with_overrides(dir.path()).unwrap();
        assert_eq!(
            templates.render(LlmRole::Judge, &[("task", "t")]),
            "custom t"
        );
        // Other roles still use the builtin text.
        assert!(!templates.template(LlmRole::Checklist).is_empty());
    }
}
