//! Record/replay fixture store keyed by prompt content.
//!
//! Fixture files hold one JSON object per line: `{key, role, prompt_digest,
//! completion}`. Keys are content hashes, so a replayed prefix after a
//! snapshot restore resolves to the same completions it saw the first time.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{fixture_key, prompt_digest, LlmBackend, LlmError, LlmRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureMode {
    Record,
    Replay,
    ReplayStrict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub key: String,
    pub role: String,
    pub prompt_digest: String,
    pub completion: String,
}

/// In-memory fixture map with optional file persistence. Record mode never
/// overwrites an existing key silently: a conflicting completion is an
/// error, an identical one is a no-op.
pub struct FixtureStore {
    entries: Mutex<BTreeMap<String, FixtureEntry>>,
    path: Option<PathBuf>,
    mode: FixtureMode,
}

impl FixtureStore {
    pub fn in_memory(mode: FixtureMode) -> Self {
        FixtureStore {
            entries: Mutex::new(BTreeMap::new()),
            path: None,
            mode,
        }
    }

    /// Opens a fixture file, loading any existing entries. The file is
    /// created on first insert when it does not exist yet.
    pub fn open(path: impl AsRef<Path>, mode: FixtureMode) -> std::io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = BTreeMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: FixtureEntry = serde_json::from_str(&line).map_err(|err| {
                    std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("bad fixture line: {err}"),
                    )
                })?;
                entries.insert(entry.key.clone(), entry);
            }
        }
        Ok(FixtureStore {
            entries: Mutex::new(entries),
            path: Some(path),
            mode,
        })
    }

    pub fn mode(&self) -> FixtureMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("fixture store poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<FixtureEntry> {
        self.entries
            .lock()
            .expect("fixture store poisoned")
            .get(key)
            .cloned()
    }

    /// Inserts an entry, appending it to the backing file when configured.
    pub fn insert(&self, entry: FixtureEntry) -> Result<(), LlmError> {
        let mut entries = self.entries.lock().expect("fixture store poisoned");
        if let Some(existing) = entries.get(&entry.key) {
            if existing.completion == entry.completion {
                return Ok(());
            }
            return Err(LlmError::Unavailable(format!(
                "fixture key {} already recorded with a different completion",
                entry.key
            )));
        }
        if let Some(path) = &self.path {
            let line = serde_json::to_string(&entry)
                .map_err(|err| LlmError::Unavailable(format!("fixture encode: {err}")))?;
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|err| LlmError::Unavailable(format!("fixture file: {err}")))?;
            writeln!(file, "{line}")
                .map_err(|err| LlmError::Unavailable(format!("fixture write: {err}")))?;
        }
        entries.insert(entry.key.clone(), entry);
        Ok(())
    }
}

/// Deterministic backend answering from recorded fixtures only.
pub struct ReplayBackend {
    store: Arc<FixtureStore>,
}

impl ReplayBackend {
    pub fn new(store: Arc<FixtureStore>) -> Self {
        ReplayBackend { store }
    }
}

impl LlmBackend for ReplayBackend {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let key = fixture_key(req.role, &req.prompt);
        match self.store.get(&key) {
            Some(entry) => Ok(entry.completion),
            None if self.store.mode() == FixtureMode::ReplayStrict => {
                Err(LlmError::FixtureMissing(key))
            }
            None => {
                // Lenient replay degrades to an empty completion so the
                // calling component's own fallback path takes over.
                tracing::warn!(role = req.role.as_str(), key, "fixture miss in lenient replay");
                Ok(String::new())
            }
        }
    }
}

/// Passes requests through to an inner backend and records the exchange.
/// A key already present is served from the store without touching the
/// inner backend, so recorded runs replay stably mid-session.
pub struct RecordingBackend {
    inner: Arc<dyn LlmBackend>,
    store: Arc<FixtureStore>,
}

impl RecordingBackend {
    pub fn new(inner: Arc<dyn LlmBackend>, store: Arc<FixtureStore>) -> Self {
        RecordingBackend { inner, store }
    }
}

impl LlmBackend for RecordingBackend {
    fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let key = fixture_key(req.role, &req.prompt);
        if let Some(entry) = self.store.get(&key) {
            return Ok(entry.completion);
        }
        let completion = self.inner.complete(req)?;
        self.store.insert(FixtureEntry {
            key,
            role: req.role.as_str().to_string(),
            prompt_digest: prompt_digest(&req.prompt),
            completion: completion.clone(),
        })?;
        Ok(completion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::LlmRole;

    fn req(prompt: &str) -> LlmRequest {
        LlmRequest::new(LlmRole::Judge, prompt)
    }

    #[test]
    fn replay_returns_stored_completion() {
        let store = Arc::new(FixtureStore::in_memory(FixtureMode::Replay));
        store
            .insert(FixtureEntry {
                key: fixture_key(LlmRole::Judge, "p"),
                role: "judge".into(),
                prompt_digest: prompt_digest("p"),
                completion: "recorded".into(),
            })
            .unwrap();
        let backend = ReplayBackend::new(store);
        assert_eq!(backend.complete(&req("p")).unwrap(), "recorded");
    }

    #[test]
    fn strict_replay_fails_on_missing_key() {
        let store = Arc::new(FixtureStore::in_memory(FixtureMode::ReplayStrict));
        let backend = ReplayBackend::new(store);
        let err = backend.complete(&req("missing")).unwrap_err();
        assert!(matches!(err, LlmError::FixtureMissing(_)));
    }

    #[test]
    fn lenient_replay_degrades_to_empty() {
        let store = Arc::new(FixtureStore::in_memory(FixtureMode::Replay));
        let backend = ReplayBackend::new(store);
        assert_eq!(backend.complete(&req("missing")).unwrap(), "");
    }

    #[test]
    fn record_then_replay_round_trips() {
        struct Upper;
        impl LlmBackend for Upper {
            fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
                Ok(req.prompt.to_uppercase())
            }
        }

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixtures.jsonl");
        {
            let store = Arc::new(FixtureStore::open(&path, FixtureMode::Record).unwrap());
            let recorder = RecordingBackend::new(Arc::new(Upper), store);
            assert_eq!(recorder.complete(&req("hello")).unwrap(), "HELLO");
            // Second identical request is served from the store.
            assert_eq!(recorder.complete(&req("hello")).unwrap(), "HELLO");
        }
        let store = Arc::new(FixtureStore::open(&path, FixtureMode::ReplayStrict).unwrap());
        assert_eq!(store.len(), 1);
        let replay = ReplayBackend::new(store);
        assert_eq!(replay.complete(&req("hello")).unwrap(), "HELLO");
    }

    #[test]
    fn conflicting_record_is_rejected() {
        let store = FixtureStore::in_memory(FixtureMode::Record);
        let entry = FixtureEntry {
            key: "k".into(),
            role: "judge".into(),
            prompt_digest: "d".into(),
            completion: "one".into(),
        };
        store.insert(entry.clone()).unwrap();
        store.insert(entry.clone()).unwrap(); // identical re-insert is fine
        let conflict = FixtureEntry {
            completion: "two".into(),
            ..entry
        };
        assert!(store.insert(conflict).is_err());
    }
}
