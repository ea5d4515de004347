//! Prompt templates.
//!
//! Prompt wording is configuration, not code: each stage loads
//! `<name>.txt` (user text) and optionally `<name>.system.txt` from the
//! configured templates directory, falling back to built-in defaults.
//! Placeholders use `{name}` and unknown braces pass through untouched.

use std::path::PathBuf;

use super::BackendError;

/// Stage template names and their built-in user-text defaults.
const DEFAULTS: &[(&str, &str)] = &[
    (
        "identify",
        "You label visual content. List the distinct visual elements that appear in the \
         provided video frames.\n\nTitle: {title}\n\nReply with a JSON list of short lowercase \
         keywords, for example [\"pig\", \"banquet\", \"cat\"].",
    ),
    (
        "generate",
        "You interpret metaphorical videos. Using the frames, the title, and the reference \
         concepts below, explain which visual elements convey which implicit meanings.\n\n\
         Title: {title}\n{references}\n\nThink through the cross-domain mappings first, then \
         give the final interpretation.",
    ),
    (
        "baseline",
        "You interpret metaphorical videos. Using the frames and the title, explain which \
         visual elements convey which implicit meanings.\n\nTitle: {title}\n\nThink through \
         the cross-domain mappings first, then give the final interpretation.",
    ),
    (
        "extract",
        "Extract metaphorical concept pairs from the text. Each pair maps a concrete source \
         concept onto an abstract target concept.\n\nText: {text}\n\nReply with a JSON list of \
         objects like [{\"source\": \"river\", \"target\": \"time\"}]. Reply [] if the text \
         contains no metaphor.",
    ),
    (
        "translate",
        "Translate the following text into English. Reply with the translation only.\n\n\
         Text: {text}",
    ),
    (
        "judge",
        "You grade a candidate interpretation of a metaphorical video against a reference \
         interpretation. Judge how accurately the candidate grounds the metaphorical visual \
         elements and reveals their implicit meanings.\n\nReference interpretation: {golden}\n\n\
         Candidate interpretation: {candidate}\n\nReply with a single integer score from 0 to 10.",
    ),
    (
        "filter_llm",
        "Decide whether this video involves metaphorical logic, based on its introduction, \
         speech transcript, and audience comments.\n\nIntroduction: {intro}\nTranscript: {asr}\n\
         Comments:\n{comments}\n\nReply yes or no on the first line, then a one-sentence rationale.",
    ),
    (
        "filter_mllm",
        "Check whether the earlier analysis is consistent with the video frames provided.\n\n\
         Introduction: {intro}\nTranscript: {asr}\nComments:\n{comments}\nEarlier analysis: \
         {analysis}\n\nReply yes or no on the first line, then a one-sentence rationale.",
    ),
];

/// Loads stage templates from a directory, with built-in fallbacks.
#[derive(Clone, Debug, Default)]
pub struct TemplateStore {
    dir: Option<PathBuf>,
}

impl TemplateStore {
    pub fn builtin() -> TemplateStore {
        TemplateStore { dir: None }
    }

    pub fn from_dir(dir: impl Into<PathBuf>) -> TemplateStore {
        TemplateStore {
            dir: Some(dir.into()),
        }
    }

    /// The user-text template for a stage.
    pub fn user(&self, name: &str) -> Result<String, BackendError> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{name}.txt"));
            if path.is_file() {
                return Ok(std::fs::read_to_string(path)?);
            }
        }
        DEFAULTS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| BackendError::Template(format!("unknown template {name:?}")))
    }

    /// Optional system text for a stage; absent by default.
    pub fn system(&self, name: &str) -> Result<Option<String>, BackendError> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{name}.system.txt"));
            if path.is_file() {
                return Ok(Some(std::fs::read_to_string(path)?));
            }
        }
        Ok(None)
    }
}

/// Substitute `{key}` placeholders; anything without a binding stays.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in vars {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_substitutes_only_bound_keys() {
        let out = render("a {x} b {y} {\"z\": 1}", &[("x", "1"), ("y", "2")]);
        assert_eq!(out, "a 1 b 2 {\"z\": 1}");
    }

    #[test]
    fn builtin_templates_exist_for_every_stage() {
        let store = TemplateStore::builtin();
        for name in [
            "identify",
            "generate",
            "baseline",
            "extract",
            "translate",
            "judge",
            "filter_llm",
            "filter_mllm",
        ] {
            assert!(store.user(name).is_ok(), "missing default for {name}");
            assert!(store.system(name).unwrap().is_none());
        }
        assert!(store.user("nope").is_err());
    }

    #[test]
    fn directory_overrides_builtin() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("judge.txt"), "custom {golden}").unwrap();
        std::fs::write(dir.path().join("judge.system.txt"), "be strict").unwrap();
        let store = TemplateStore::from_dir(dir.path());
        assert_eq!(store.user("judge").unwrap(), "custom {golden}");
        assert_eq!(store.system("judge").unwrap().as_deref(), Some("be strict"));
        // Unoverridden stages still fall back.
        assert!(store.user("identify").unwrap().contains("{title}"));
    }
}
