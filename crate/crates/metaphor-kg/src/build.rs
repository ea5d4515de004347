//! Deterministic graph construction from extracted concept pairs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::KgError;
use crate::graph::{ConceptNode, Edge, EdgeKind, MetaphorGraph, NodeId, RoleSet};
use crate::normalize::normalize_label;

/// One extracted metaphorical concept pair attributed to a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptPair {
    pub source: String,
    pub target: String,
    pub doc_id: String,
}

impl ConceptPair {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        doc_id: impl Into<String>,
    ) -> Self {
        ConceptPair {
            source: source.into(),
            target: target.into(),
            doc_id: doc_id.into(),
        }
    }
}

/// Edge-layer toggles for graph construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    /// Connect concepts extracted from the same document.
    pub cooccur: bool,
    /// Connect concepts whose similarity clears `similar_threshold`.
    /// Requires a similarity provider at build time.
    pub similar: bool,
    pub similar_threshold: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cooccur: true,
            similar: false,
            similar_threshold: 0.8,
        }
    }
}

/// Pairwise similarity between normalized labels, in [0, 1].
///
/// Backed by an external embedding service in production; tests supply a
/// deterministic stand-in. Similarity edges are off by default.
pub trait SimilarityProvider {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Source or target normalized to the empty string.
    EmptyLabel,
    /// Source and target normalized to the same concept.
    SelfMapping,
}

/// An input pair that was skipped, with the offending raw strings.
#[derive(Clone, Debug, Serialize)]
pub struct PairReject {
    pub doc_id: String,
    pub source: String,
    pub target: String,
    pub reason: RejectReason,
}

/// Result of a build: the graph plus all skipped inputs.
pub struct GraphBuild {
    pub graph: MetaphorGraph,
    pub rejects: Vec<PairReject>,
}

/// Build a graph from extracted pairs.
///
/// A pure function of the input pair multiset: node ids follow sorted
/// label order, so shuffled inputs produce identical graphs. Pairs whose
/// labels normalize to nothing, or whose two sides normalize to the same
/// concept, are reported and skipped.
pub fn build_graph(pairs: &[ConceptPair], options: &BuildOptions) -> Result<GraphBuild, KgError> {
    build_graph_with_similarity(pairs, options, None)
}

/// As [`build_graph`], with a similarity provider for the optional
/// similar-edge layer.
pub fn build_graph_with_similarity(
    pairs: &[ConceptPair],
    options: &BuildOptions,
    similarity: Option<&dyn SimilarityProvider>,
) -> Result<GraphBuild, KgError> {
    if options.similar && similarity.is_none() {
        return Err(KgError::InvalidParams(
            "similar edges enabled but no similarity provider given".into(),
        ));
    }
    if options.similar && !(0.0..=1.0).contains(&options.similar_threshold) {
        return Err(KgError::InvalidParams(format!(
            "similar_threshold must be in [0, 1], got {}",
            options.similar_threshold
        )));
    }

    let mut rejects = Vec::new();
    // (normalized source, normalized target, doc_id) for every kept pair.
    let mut accepted: Vec<(String, String, &str)> = Vec::new();
    let mut raw_labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for pair in pairs {
        let source = normalize_label(&pair.source);
        let target = normalize_label(&pair.target);
        if source.is_empty() || target.is_empty() {
            rejects.push(PairReject {
                doc_id: pair.doc_id.clone(),
                source: pair.source.clone(),
                target: pair.target.clone(),
                reason: RejectReason::EmptyLabel,
            });
            continue;
        }
        if source == target {
            rejects.push(PairReject {
                doc_id: pair.doc_id.clone(),
                source: pair.source.clone(),
                target: pair.target.clone(),
                reason: RejectReason::SelfMapping,
            });
            continue;
        }
        raw_labels
            .entry(source.clone())
            .or_default()
            .insert(pair.source.trim().to_string());
        raw_labels
            .entry(target.clone())
            .or_default()
            .insert(pair.target.trim().to_string());
        accepted.push((source, target, &pair.doc_id));
    }

    // Node ids by sorted normalized label.
    let labels: BTreeSet<&str> = accepted
        .iter()
        .flat_map(|(s, t, _)| [s.as_str(), t.as_str()])
        .collect();
    let ids: BTreeMap<&str, NodeId> = labels
        .iter()
        .enumerate()
        .map(|(i, label)| (*label, NodeId(i as u32)))
        .collect();

    let mut freq: BTreeMap<NodeId, u32> = BTreeMap::new();
    let mut roles: BTreeMap<NodeId, RoleSet> = BTreeMap::new();
    let mut mapping: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
    let mut by_doc: BTreeMap<&str, BTreeSet<NodeId>> = BTreeMap::new();

    for (source, target, doc_id) in &accepted {
        let s = ids[source.as_str()];
        let t = ids[target.as_str()];
        *freq.entry(s).or_insert(0) += 1;
        *freq.entry(t).or_insert(0) += 1;
        roles.entry(s).or_default().insert(RoleSet::SOURCE);
        roles.entry(t).or_default().insert(RoleSet::TARGET);
        *mapping.entry(unordered(s, t)).or_insert(0) += 1;
        let doc = by_doc.entry(doc_id).or_default();
        doc.insert(s);
        doc.insert(t);
    }

    let mut edges: Vec<Edge> = mapping
        .iter()
        .map(|(&(u, v), &weight)| Edge {
            u,
            v,
            kind: EdgeKind::Mapping,
            weight,
        })
        .collect();

    // Co-occurrence fills in document-mate pairs that mapping did not
    // already connect; an unordered pair carries at most one edge, with
    // mapping taking precedence over cooccur over similar.
    let mut connected: BTreeSet<(NodeId, NodeId)> = mapping.keys().copied().collect();
    if options.cooccur {
        let mut cooccur: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
        for members in by_doc.values() {
            let members: Vec<NodeId> = members.iter().copied().collect();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let key = unordered(a, b);
                    if !connected.contains(&key) {
                        *cooccur.entry(key).or_insert(0) += 1;
                    }
                }
            }
        }
        for (&(u, v), &weight) in &cooccur {
            connected.insert((u, v));
            edges.push(Edge {
                u,
                v,
                kind: EdgeKind::Cooccur,
                weight,
            });
        }
    }

    if options.similar {
        let provider = similarity.expect("checked above");
        let ordered: Vec<&str> = labels.iter().copied().collect();
        for (i, &a) in ordered.iter().enumerate() {
            for &b in &ordered[i + 1..] {
                let key = unordered(ids[a], ids[b]);
                if connected.contains(&key) {
                    continue;
                }
                if provider.similarity(a, b) >= options.similar_threshold {
                    connected.insert(key);
                    edges.push(Edge {
                        u: key.0,
                        v: key.1,
                        kind: EdgeKind::Similar,
                        weight: 1,
                    });
                }
            }
        }
    }

    edges.sort_unstable_by_key(|e| (e.u, e.v, e.kind));

    let nodes: Vec<ConceptNode> = labels
        .iter()
        .map(|&label| {
            let id = ids[label];
            ConceptNode {
                id,
                label: label.to_string(),
                raw_labels: raw_labels.remove(label).unwrap_or_default(),
                roles: roles[&id],
                freq: freq[&id],
            }
        })
        .collect();

    let graph = MetaphorGraph::from_parts(nodes, edges, Some(options.clone()))?;
    Ok(GraphBuild { graph, rejects })
}

fn unordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
