//! Scriptable mock backend for deterministic tests and dry runs.
//!
//! The fixture file maps request digests (see
//! [`request_digest`](super::request_digest)) to canned replies, with an
//! optional default for everything else:
//!
//! ```json
//! {
//!   "entries": { "<digest-hex>": { "thinking": null, "text": "..." } },
//!   "default": { "text": "fallback reply" }
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{request_digest, BackendError, ChatReply, ChatRequest, ModelBackend};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScriptFixture {
    #[serde(default)]
    pub entries: BTreeMap<String, ChatReply>,
    #[serde(default)]
    pub default: Option<ChatReply>,
}

pub struct ScriptedBackend {
    name: String,
    fixture: ScriptFixture,
}

impl ScriptedBackend {
    pub fn new(name: &str) -> ScriptedBackend {
        ScriptedBackend {
            name: name.to_string(),
            fixture: ScriptFixture::default(),
        }
    }

    pub fn from_fixture(name: &str, fixture: ScriptFixture) -> ScriptedBackend {
        ScriptedBackend {
            name: name.to_string(),
            fixture,
        }
    }

    pub fn from_fixture_file(name: &str, path: &Path) -> Result<ScriptedBackend, BackendError> {
        let text = std::fs::read_to_string(path)?;
        let fixture: ScriptFixture = serde_json::from_str(&text)
            .map_err(|e| BackendError::Config(format!("bad fixture {}: {e}", path.display())))?;
        Ok(ScriptedBackend::from_fixture(name, fixture))
    }

    /// Script a reply for exactly this request.
    pub fn with_reply(mut self, request: &ChatRequest, reply: ChatReply) -> ScriptedBackend {
        self.fixture.entries.insert(request_digest(request), reply);
        self
    }

    pub fn with_text_reply(self, request: &ChatRequest, text: &str) -> ScriptedBackend {
        self.with_reply(request, ChatReply::text_only(text))
    }

    /// Fallback reply for any unscripted request.
    pub fn with_default(mut self, reply: ChatReply) -> ScriptedBackend {
        self.fixture.default = Some(reply);
        self
    }

    pub fn fixture(&self) -> &ScriptFixture {
        &self.fixture
    }

    pub fn write_fixture_file(&self, path: &Path) -> Result<(), BackendError> {
        let text = serde_json::to_string_pretty(&self.fixture)
            .map_err(|e| BackendError::Config(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl ModelBackend for ScriptedBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn chat(&self, request: &ChatRequest) -> Result<ChatReply, BackendError> {
        let digest = request_digest(request);
        if let Some(reply) = self.fixture.entries.get(&digest) {
            return Ok(reply.clone());
        }
        if let Some(reply) = &self.fixture.default {
            return Ok(reply.clone());
        }
        Err(BackendError::Unscripted(digest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_replies_match_by_digest() {
        let request = ChatRequest::text("identify", 0.7);
        let backend = ScriptedBackend::new("mock").with_text_reply(&request, "[\"cat\"]");
        assert_eq!(backend.chat(&request).unwrap().text, "[\"cat\"]");

        let other = ChatRequest::text("different", 0.7);
        assert!(matches!(
            backend.chat(&other),
            Err(BackendError::Unscripted(_))
        ));
    }

    #[test]
    fn default_reply_covers_unscripted_requests() {
        let backend = ScriptedBackend::new("mock").with_default(ChatReply::text_only("fallback"));
        let reply = backend.chat(&ChatRequest::text("anything", 0.0)).unwrap();
        assert_eq!(reply.text, "fallback");
    }

    #[test]
    fn fixture_round_trips_through_file() {
        let request = ChatRequest::text("q", 0.0);
        let backend = ScriptedBackend::new("mock").with_text_reply(&request, "a");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture.json");
        backend.write_fixture_file(&path).unwrap();
        let loaded = ScriptedBackend::from_fixture_file("mock", &path).unwrap();
        assert_eq!(loaded.chat(&request).unwrap().text, "a");
    }
}
