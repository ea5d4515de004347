//! Corpus loading, concept-pair extraction, and graph ingestion.

mod extract;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use metaphor_kg::{
    build_graph, BuildOptions, ConceptPair, EdgeKind, KgError, MetaphorGraph, NodeId,
};

pub use extract::{
    extract_pairs, ChatExtractor, ChatTranslator, DocOutcome, ExtractOutcome, ExtractReport,
    ExtractorClient, ScriptedExtractor, ScriptedTranslator, TranslationClient,
};

use crate::backend::BackendError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("manifest: {0}")]
    Manifest(String),

    #[error("dataset {dataset} line {line}: missing or non-string field {field:?}")]
    MissingField {
        dataset: String,
        line: usize,
        field: String,
    },

    #[error(transparent)]
    Backend(#[from] BackendError),

    #[error(transparent)]
    Kg(#[from] KgError),

    #[error("count conservation violated: {0}")]
    Conservation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Document language, as far as the pipeline cares: English goes straight
/// to extraction, anything else is routed through translation first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lang {
    En,
    Other,
}

/// One corpus document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDoc {
    /// Stable id: `<dataset>#<line-number>`.
    pub doc_id: String,
    pub text: String,
    pub lang: Lang,
    pub dataset: String,
}

/// Per-dataset source description: where the JSON Lines file lives and
/// which field holds the text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub text_field: String,
    #[serde(default)]
    pub translate: bool,
}

/// Maps dataset name to its source description.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DatasetManifest(pub BTreeMap<String, DatasetSpec>);

impl DatasetManifest {
    pub fn from_file(path: &Path) -> Result<DatasetManifest, IngestError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| IngestError::Manifest(format!("{}: {e}", path.display())))
    }
}

/// Per-dataset load bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatasetCount {
    pub lines: usize,
    pub loaded: usize,
    pub skipped_malformed: usize,
}

/// Loaded corpus plus its per-dataset counts.
#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub docs: Vec<CorpusDoc>,
    pub per_dataset: BTreeMap<String, DatasetCount>,
}

impl CorpusLoad {
    pub fn skipped_total(&self) -> usize {
        self.per_dataset.values().map(|c| c.skipped_malformed).sum()
    }
}

/// Load every dataset named in the manifest.
///
/// Lines that fail to parse as JSON objects, or whose text is empty, are
/// counted and skipped. A parsed line missing the mapped text field is a
/// hard error: that is a manifest mistake, not a data blemish. Relative
/// dataset paths resolve against `base`.
pub fn load_corpus(base: &Path, manifest: &DatasetManifest) -> Result<CorpusLoad, IngestError> {
    let mut load = CorpusLoad::default();
    for (name, spec) in &manifest.0 {
        let path = if spec.path.is_absolute() {
            spec.path.clone()
        } else {
            base.join(&spec.path)
        };
        let text = std::fs::read_to_string(&path).map_err(|e| {
            IngestError::Manifest(format!("dataset {name}: cannot read {}: {e}", path.display()))
        })?;
        let mut count = DatasetCount::default();
        let lang = if spec.translate { Lang::Other } else { Lang::En };
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            count.lines += 1;
            let value: serde_json::Value = match serde_json::from_str(line) {
                Ok(v) => v,
                Err(_) => {
                    count.skipped_malformed += 1;
                    continue;
                }
            };
            if !value.is_object() {
                count.skipped_malformed += 1;
                continue;
            }
            let doc_text = match value.get(&spec.text_field) {
                Some(serde_json::Value::String(s)) => s,
                _ => {
                    return Err(IngestError::MissingField {
                        dataset: name.clone(),
                        line: line_no,
                        field: spec.text_field.clone(),
                    });
                }
            };
            if doc_text.trim().is_empty() {
                count.skipped_malformed += 1;
                continue;
            }
            load.docs.push(CorpusDoc {
                doc_id: format!("{name}#{line_no}"),
                text: doc_text.clone(),
                lang,
                dataset: name.clone(),
            });
            count.loaded += 1;
        }
        log::info!(
            "dataset {name}: {} loaded, {} skipped of {} lines",
            count.loaded,
            count.skipped_malformed,
            count.lines
        );
        load.per_dataset.insert(name.clone(), count);
    }
    Ok(load)
}

/// One validated extracted pair, attributed to its document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractedPair {
    pub doc_id: String,
    pub source: String,
    pub target: String,
    /// Provider id of the extractor that produced the pair.
    pub extractor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

/// Build summary emitted alongside the graph.
#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub nodes: usize,
    pub edges: usize,
    pub edges_by_kind: BTreeMap<String, usize>,
    /// Highest-degree concepts, up to ten.
    pub top_degree: Vec<(String, usize)>,
    pub pairs_in: usize,
    pub pairs_rejected: usize,
}

/// Feed extracted pairs to the graph builder.
pub fn ingest_to_graph(
    pairs: &[ExtractedPair],
    options: &BuildOptions,
) -> Result<(MetaphorGraph, BuildReport), IngestError> {
    let concept_pairs: Vec<ConceptPair> = pairs
        .iter()
        .map(|p| ConceptPair::new(p.source.clone(), p.target.clone(), p.doc_id.clone()))
        .collect();
    let built = build_graph(&concept_pairs, options)?;

    let mut degrees: Vec<(String, usize)> = built
        .graph
        .nodes()
        .iter()
        .map(|n| {
            let degree = built
                .graph
                .degree(NodeId(n.id.0))
                .expect("node id from the graph itself");
            (n.label.clone(), degree)
        })
        .collect();
    degrees.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    degrees.truncate(10);

    let edges_by_kind = built
        .graph
        .edge_counts_by_kind()
        .into_iter()
        .map(|(kind, count)| {
            let name = match kind {
                EdgeKind::Mapping => "mapping",
                EdgeKind::Cooccur => "cooccur",
                EdgeKind::Similar => "similar",
            };
            (name.to_string(), count)
        })
        .collect();

    let report = BuildReport {
        nodes: built.graph.node_count(),
        edges: built.graph.edge_count(),
        edges_by_kind,
        top_degree: degrees,
        pairs_in: pairs.len(),
        pairs_rejected: built.rejects.len(),
    };
    Ok((built.graph, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_lines(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, lines.join("\n")).unwrap();
        path
    }

    fn manifest_for(entries: &[(&str, &str)]) -> DatasetManifest {
        DatasetManifest(
            entries
                .iter()
                .map(|(name, file)| {
                    (
                        name.to_string(),
                        DatasetSpec {
                            path: PathBuf::from(file),
                            text_field: "text".into(),
                            translate: false,
                        },
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn loads_docs_with_stable_line_ids() {
        let dir = tempfile::tempdir().unwrap();
        write_lines(
            dir.path(),
            "a.jsonl",
            &["{\"text\": \"one\"}", "{\"text\": \"two\"}"],
        );
        let load = load_corpus(dir.path(), &manifest_for(&[("a", "a.jsonl")])).unwrap();
        assert_eq!(load.docs.len(), 2);
        assert_eq!(load.docs[0].doc_id, "a#1");
        assert_eq!(load.docs[1].doc_id, "a#2");
        assert_eq!(load.per_dataset["a"].loaded, 2);
    }

    #[test]
    fn empty_file_loads_zero_docs_without_error() {
        let dir = tempfile::tempdir().unwrap();
        write_lines(dir.path(), "a.jsonl", &[]);
        let load = load_corpus(dir.path(), &manifest_for(&[("a", "a.jsonl")])).unwrap();
        assert!(load.docs.is_empty());
        assert_eq!(load.per_dataset["a"].lines, 0);
    }

    #[test]
    fn malformed_lines_are_counted_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        write_lines(
            dir.path(),
            "a.jsonl",
            &[
                "{\"text\": \"one\"}",
                "{\"text\": \"two\"}",
                "{\"text\": \"three\"}",
                "{ not json",
            ],
        );
        let load = load_corpus(dir.path(), &manifest_for(&[("a", "a.jsonl")])).unwrap();
        assert_eq!(load.docs.len(), 3);
        assert_eq!(load.per_dataset["a"].skipped_malformed, 1);
        assert_eq!(load.skipped_total(), 1);
    }

    #[test]
    fn missing_mapped_field_is_a_hard_error() {
        let dir = tempfile::tempdir().unwrap();
        write_lines(dir.path(), "a.jsonl", &["{\"body\": \"one\"}"]);
        let err = load_corpus(dir.path(), &manifest_for(&[("a", "a.jsonl")])).unwrap_err();
        assert!(matches!(err, IngestError::MissingField { .. }));
    }

    #[test]
    fn four_dataset_sizes_sum_to_expected_total() {
        let dir = tempfile::tempdir().unwrap();
        let sizes = [("d1", 718usize), ("d2", 200), ("d3", 28_000), ("d4", 8_030)];
        for (name, size) in sizes {
            let lines: Vec<String> = (0..size)
                .map(|i| format!("{{\"text\": \"sample {i}\"}}"))
                .collect();
            std::fs::write(
                dir.path().join(format!("{name}.jsonl")),
                lines.join("\n"),
            )
            .unwrap();
        }
        let manifest = manifest_for(&[
            ("d1", "d1.jsonl"),
            ("d2", "d2.jsonl"),
            ("d3", "d3.jsonl"),
            ("d4", "d4.jsonl"),
        ]);
        let load = load_corpus(dir.path(), &manifest).unwrap();
        assert_eq!(load.docs.len(), 36_948);
    }

    #[test]
    fn translate_flag_sets_language() {
        let dir = tempfile::tempdir().unwrap();
        write_lines(dir.path(), "a.jsonl", &["{\"text\": \"x\"}"]);
        let manifest = DatasetManifest(BTreeMap::from([(
            "a".to_string(),
            DatasetSpec {
                path: PathBuf::from("a.jsonl"),
                text_field: "text".into(),
                translate: true,
            },
        )]));
        let load = load_corpus(dir.path(), &manifest).unwrap();
        assert_eq!(load.docs[0].lang, Lang::Other);
    }

    #[test]
    fn build_report_summarizes_graph() {
        let pairs = vec![
            ExtractedPair {
                doc_id: "a#1".into(),
                source: "time".into(),
                target: "river".into(),
                extractor: "mock".into(),
                confidence: None,
            },
            ExtractedPair {
                doc_id: "a#1".into(),
                source: "life".into(),
                target: "river".into(),
                extractor: "mock".into(),
                confidence: None,
            },
        ];
        let (graph, report) = ingest_to_graph(&pairs, &BuildOptions::default()).unwrap();
        assert_eq!(graph.node_count(), 3);
        assert_eq!(report.nodes, 3);
        assert_eq!(report.edges_by_kind["mapping"], 2);
        assert_eq!(report.edges_by_kind["cooccur"], 1);
        assert_eq!(report.top_degree[0].0, "river");
        assert_eq!(report.pairs_rejected, 0);
    }
}
