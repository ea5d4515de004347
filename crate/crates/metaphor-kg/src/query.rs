//! Keyword matching, h-hop neighborhoods, and the common-connection query.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::KgError;
use crate::graph::{MetaphorGraph, NodeId};
use crate::normalize::{label_tokens, normalize_label};

/// Keyword-to-node matching behavior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    /// When no exact label match exists, fall back to nodes sharing at
    /// least one full token with the keyword.
    pub token_fallback: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            token_fallback: true,
        }
    }
}

/// Resolve keywords to node ids.
///
/// Matching is exact on the normalized label; with fallback enabled, a
/// keyword with no exact match instead matches every node whose label
/// shares at least one full token with it. Unmatched keywords map to the
/// empty set, which is a valid outcome.
pub fn match_keywords(
    graph: &MetaphorGraph,
    keywords: &[String],
    options: &MatchOptions,
) -> BTreeMap<String, BTreeSet<NodeId>> {
    let mut matched = BTreeMap::new();
    for keyword in keywords {
        let ids = matched.entry(keyword.clone()).or_insert_with(BTreeSet::new);
        let normalized = normalize_label(keyword);
        if normalized.is_empty() {
            continue;
        }
        if let Some(id) = graph.lookup_label(&normalized) {
            ids.insert(id);
            continue;
        }
        if options.token_fallback {
            let tokens: BTreeSet<&str> = label_tokens(&normalized).collect();
            for node in graph.nodes() {
                if label_tokens(&node.label).any(|t| tokens.contains(t)) {
                    ids.insert(node.id);
                }
            }
        }
    }
    matched
}

/// Minimum hop distances from a seed set, out to `h` hops.
///
/// Breadth-first over undirected adjacency across all edge kinds. Seeds
/// themselves are excluded: the result maps exactly the nodes with
/// `1 <= min_hops <= h`.
pub fn hop_ball(
    graph: &MetaphorGraph,
    seeds: &BTreeSet<NodeId>,
    h: u32,
) -> Result<BTreeMap<NodeId, u32>, KgError> {
    if h == 0 {
        return Err(KgError::InvalidParams("hop count h must be >= 1".into()));
    }
    if seeds.is_empty() {
        return Err(KgError::InvalidParams("seed set must be non-empty".into()));
    }
    let n = graph.node_count();
    let mut dist: Vec<u32> = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for &seed in seeds {
        if seed.index() >= n {
            return Err(KgError::InvalidNodeId(seed.0));
        }
        dist[seed.index()] = 0;
        queue.push_back(seed);
    }
    while let Some(node) = queue.pop_front() {
        let d = dist[node.index()];
        if d == h {
            continue;
        }
        for &(next, _) in graph.neighbors(node)? {
            if dist[next.index()] == u32::MAX {
                dist[next.index()] = d + 1;
                queue.push_back(next);
            }
        }
    }
    let mut ball = BTreeMap::new();
    for (i, &d) in dist.iter().enumerate() {
        if d >= 1 && d <= h {
            ball.insert(NodeId(i as u32), d);
        }
    }
    Ok(ball)
}

/// How the candidate set is reduced to at most `z` entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum QueryMode {
    /// Deterministic ranking by keyword coverage.
    Ranked,
    /// Uniform sample without replacement, for ablation runs.
    Random { seed: u64 },
}

/// Query parameters echoed into every result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalParams {
    pub h: u32,
    pub z: usize,
    #[serde(flatten)]
    pub mode: QueryMode,
}

/// One retrieved target concept with its score provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalEntry {
    pub id: NodeId,
    pub label: String,
    /// Distinct keywords whose h-hop ball contains this node.
    pub coverage: u32,
    /// Distinct keyword-matched nodes directly adjacent to this node.
    pub direct_links: u32,
    /// Smallest hop distance from any matched keyword.
    pub min_hops: u32,
}

/// Ranked target concepts returned by the common-connection query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub entries: Vec<RetrievalEntry>,
    pub params: RetrievalParams,
}

/// Query the graph for target concepts connected to the most keywords.
///
/// Candidates are the union of each matched keyword's h-hop ball, minus
/// every keyword-matched node. Ranked mode sorts by coverage descending,
/// then direct links descending, min hops ascending, node frequency
/// descending, and label ascending, keeping the first `z`. Random mode
/// samples `min(z, candidates)` uniformly without replacement and
/// presents the sample in the same order.
pub fn query_common_connection(
    graph: &MetaphorGraph,
    keywords: &[String],
    h: u32,
    z: usize,
    mode: QueryMode,
) -> Result<RetrievalResult, KgError> {
    query_with_options(graph, keywords, h, z, mode, &MatchOptions::default())
}

/// As [`query_common_connection`] with explicit matching options.
pub fn query_with_options(
    graph: &MetaphorGraph,
    keywords: &[String],
    h: u32,
    z: usize,
    mode: QueryMode,
    match_options: &MatchOptions,
) -> Result<RetrievalResult, KgError> {
    if h == 0 {
        return Err(KgError::InvalidParams("hop count h must be >= 1".into()));
    }
    let params = RetrievalParams { h, z, mode };

    // Deduplicate keywords by normalized form; coverage counts distinct
    // keywords, not repeated mentions.
    let mut by_normalized: BTreeMap<String, String> = BTreeMap::new();
    for keyword in keywords {
        let normalized = normalize_label(keyword);
        if !normalized.is_empty() {
            by_normalized.entry(normalized).or_insert_with(|| keyword.clone());
        }
    }
    let distinct: Vec<String> = by_normalized.values().cloned().collect();
    let matched = match_keywords(graph, &distinct, match_options);

    let matched_all: BTreeSet<NodeId> = matched.values().flatten().copied().collect();
    if matched_all.is_empty() || z == 0 {
        return Ok(RetrievalResult {
            entries: Vec::new(),
            params,
        });
    }

    // One ball per keyword with matches.
    let mut balls: Vec<BTreeMap<NodeId, u32>> = Vec::new();
    for seeds in matched.values() {
        if !seeds.is_empty() {
            balls.push(hop_ball(graph, seeds, h)?);
        }
    }

    let mut candidates: BTreeSet<NodeId> = balls.iter().flat_map(|b| b.keys().copied()).collect();
    for id in &matched_all {
        candidates.remove(id);
    }

    let mut entries: Vec<RetrievalEntry> = Vec::with_capacity(candidates.len());
    for id in candidates {
        let mut coverage = 0u32;
        let mut min_hops = u32::MAX;
        for ball in &balls {
            if let Some(&d) = ball.get(&id) {
                coverage += 1;
                min_hops = min_hops.min(d);
            }
        }
        let mut direct_links = 0u32;
        let mut last = None;
        for &(neighbor, _) in graph.neighbors(id)? {
            // Adjacency is sorted, so repeated ids (multi-kind pairs)
            // are consecutive; count each matched neighbor once.
            if last == Some(neighbor) {
                continue;
            }
            last = Some(neighbor);
            if matched_all.contains(&neighbor) {
                direct_links += 1;
            }
        }
        entries.push(RetrievalEntry {
            id,
            label: graph.node(id)?.label.clone(),
            coverage,
            direct_links,
            min_hops,
        });
    }

    match mode {
        QueryMode::Ranked => {
            entries.sort_by(|a, b| ranking_order(graph, a, b));
            entries.truncate(z);
        }
        QueryMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let take = z.min(entries.len());
            // Entries are in ascending id order here; a partial
            // Fisher-Yates picks the sample deterministically.
            for i in 0..take {
                let j = rng.random_range(i..entries.len());
                entries.swap(i, j);
            }
            entries.truncate(take);
            entries.sort_by(|a, b| ranking_order(graph, a, b));
        }
    }

    Ok(RetrievalResult { entries, params })
}

/// The documented total order: coverage desc, direct links desc, min
/// hops asc, node frequency desc, label asc.
fn ranking_order(graph: &MetaphorGraph, a: &RetrievalEntry, b: &RetrievalEntry) -> Ordering {
    b.coverage
        .cmp(&a.coverage)
        .then_with(|| b.direct_links.cmp(&a.direct_links))
        .then_with(|| a.min_hops.cmp(&b.min_hops))
        .then_with(|| {
            let fa = graph.node(a.id).map(|n| n.freq).unwrap_or(0);
            let fb = graph.node(b.id).map(|n| n.freq).unwrap_or(0);
            fb.cmp(&fa)
        })
        .then_with(|| a.label.cmp(&b.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{build_graph, BuildOptions, ConceptPair};

    fn path_graph() -> MetaphorGraph {
        // a - b - c as mapping edges.
        build_graph(
            &[
                ConceptPair::new("a", "b", "d1"),
                ConceptPair::new("b", "c", "d2"),
            ],
            &BuildOptions::default(),
        )
        .unwrap()
        .graph
    }

    fn id(graph: &MetaphorGraph, label: &str) -> NodeId {
        graph.lookup_label(label).unwrap()
    }

    #[test]
    fn match_is_exact_after_normalization() {
        let graph = path_graph();
        let m = match_keywords(&graph, &["A".to_string()], &MatchOptions::default());
        assert_eq!(m["A"], BTreeSet::from([id(&graph, "a")]));
    }

    #[test]
    fn unmatched_keyword_yields_empty_set() {
        let graph = path_graph();
        let m = match_keywords(&graph, &["xyzzy".to_string()], &MatchOptions::default());
        assert!(m["xyzzy"].is_empty());
    }

    #[test]
    fn token_fallback_matches_shared_tokens() {
        let built = build_graph(
            &[
                ConceptPair::new("rose", "love", "d1"),
                ConceptPair::new("red sky", "warning", "d2"),
            ],
            &BuildOptions::default(),
        )
        .unwrap();
        let graph = built.graph;
        let m = match_keywords(&graph, &["red rose".to_string()], &MatchOptions::default());
        let expected = BTreeSet::from([id(&graph, "rose"), id(&graph, "red sky")]);
        assert_eq!(m["red rose"], expected);

        let strict = MatchOptions {
            token_fallback: false,
        };
        let m = match_keywords(&graph, &["red rose".to_string()], &strict);
        assert!(m["red rose"].is_empty());
    }

    #[test]
    fn hop_ball_on_path_graph() {
        let graph = path_graph();
        let seeds = BTreeSet::from([id(&graph, "a")]);
        let ball = hop_ball(&graph, &seeds, 1).unwrap();
        assert_eq!(ball, BTreeMap::from([(id(&graph, "b"), 1)]));

        let ball = hop_ball(&graph, &seeds, 2).unwrap();
        assert_eq!(
            ball,
            BTreeMap::from([(id(&graph, "b"), 1), (id(&graph, "c"), 2)])
        );
    }

    #[test]
    fn hop_ball_rejects_bad_arguments() {
        let graph = path_graph();
        let seeds = BTreeSet::from([NodeId(99)]);
        assert!(matches!(
            hop_ball(&graph, &seeds, 1),
            Err(KgError::InvalidNodeId(99))
        ));
        assert!(hop_ball(&graph, &BTreeSet::new(), 1).is_err());
        let valid = BTreeSet::from([NodeId(0)]);
        assert!(hop_ball(&graph, &valid, 0).is_err());
    }

    #[test]
    fn empty_keywords_give_empty_result() {
        let graph = path_graph();
        let result = query_common_connection(&graph, &[], 2, 10, QueryMode::Ranked).unwrap();
        assert!(result.entries.is_empty());
        assert_eq!(result.params.h, 2);
    }

    #[test]
    fn star_center_links_all_keywords() {
        let built = build_graph(
            &[
                ConceptPair::new("k1", "x", "d1"),
                ConceptPair::new("k2", "x", "d2"),
                ConceptPair::new("k3", "x", "d3"),
            ],
            &BuildOptions::default(),
        )
        .unwrap();
        let graph = built.graph;
        let keywords: Vec<String> = ["k1", "k2", "k3"].iter().map(|s| s.to_string()).collect();
        let result = query_common_connection(&graph, &keywords, 1, 10, QueryMode::Ranked).unwrap();
        assert_eq!(result.entries.len(), 1);
        let entry = &result.entries[0];
        assert_eq!(entry.label, "x");
        assert_eq!(entry.coverage, 3);
        assert_eq!(entry.direct_links, 3);
        assert_eq!(entry.min_hops, 1);
    }

    #[test]
    fn duplicate_keywords_count_once() {
        let built = build_graph(
            &[ConceptPair::new("k1", "x", "d1")],
            &BuildOptions::default(),
        )
        .unwrap();
        let keywords = vec!["k1".to_string(), "K1".to_string(), " k1 ".to_string()];
        let result =
            query_common_connection(&built.graph, &keywords, 1, 10, QueryMode::Ranked).unwrap();
        assert_eq!(result.entries[0].coverage, 1);
    }

    #[test]
    fn z_zero_is_empty_not_error() {
        let graph = path_graph();
        let result =
            query_common_connection(&graph, &["a".to_string()], 2, 0, QueryMode::Ranked).unwrap();
        assert!(result.entries.is_empty());
    }

    #[test]
    fn matched_nodes_never_appear_in_entries() {
        let graph = path_graph();
        let keywords = vec!["a".to_string(), "b".to_string()];
        let result = query_common_connection(&graph, &keywords, 2, 10, QueryMode::Ranked).unwrap();
        for entry in &result.entries {
            assert_ne!(entry.label, "a");
            assert_ne!(entry.label, "b");
        }
    }

    #[test]
    fn random_mode_is_seed_deterministic() {
        let built = build_graph(
            &[
                ConceptPair::new("k", "a", "d1"),
                ConceptPair::new("k", "b", "d2"),
                ConceptPair::new("k", "c", "d3"),
                ConceptPair::new("k", "d", "d4"),
            ],
            &BuildOptions::default(),
        )
        .unwrap();
        let keywords = vec!["k".to_string()];
        let mode = QueryMode::Random { seed: 7 };
        let first =
            query_common_connection(&built.graph, &keywords, 1, 2, mode).unwrap();
        let second =
            query_common_connection(&built.graph, &keywords, 1, 2, mode).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.entries.len(), 2);
    }

    #[test]
    fn mode_serialization_shapes() {
        let ranked = serde_json::to_value(QueryMode::Ranked).unwrap();
        assert_eq!(ranked, serde_json::json!({"mode": "ranked"}));
        let random = serde_json::to_value(QueryMode::Random { seed: 7 }).unwrap();
        assert_eq!(random, serde_json::json!({"mode": "random", "seed": 7}));
    }
}
