//! Core graph data structures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::build::BuildOptions;
use crate::error::KgError;
use crate::io;

/// Dense node identifier, assigned by sorted-label order at build time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which sides of extracted pairs a concept appeared on.
///
/// Bit 0 marks source, bit 1 marks target; the bitmask is what the graph
/// file stores.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoleSet(u8);

impl RoleSet {
    pub const SOURCE: RoleSet = RoleSet(1);
    pub const TARGET: RoleSet = RoleSet(2);

    pub fn insert(&mut self, other: RoleSet) {
        self.0 |= other.0;
    }

    pub fn contains(self, other: RoleSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(bits: u8) -> Option<RoleSet> {
        if bits == 0 || bits > 3 {
            None
        } else {
            Some(RoleSet(bits))
        }
    }
}

/// Edge provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// From an extracted (source, target) metaphorical pair.
    Mapping,
    /// Both concepts were extracted from the same document.
    Cooccur,
    /// Embedding similarity above the configured threshold.
    Similar,
}

impl EdgeKind {
    pub fn as_char(self) -> char {
        match self {
            EdgeKind::Mapping => 'm',
            EdgeKind::Cooccur => 'c',
            EdgeKind::Similar => 's',
        }
    }

    pub fn from_char(c: char) -> Option<EdgeKind> {
        match c {
            'm' => Some(EdgeKind::Mapping),
            'c' => Some(EdgeKind::Cooccur),
            's' => Some(EdgeKind::Similar),
            _ => None,
        }
    }
}

/// A normalized metaphorical concept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptNode {
    pub id: NodeId,
    /// Normalized label; unique within the graph.
    pub label: String,
    /// Original surface strings merged into this node.
    pub raw_labels: BTreeSet<String>,
    pub roles: RoleSet,
    /// Number of extracted pairs mentioning this concept.
    pub freq: u32,
}

/// Undirected edge between two concepts, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub kind: EdgeKind,
    /// Number of supporting observations.
    pub weight: u32,
}

/// Build parameters and content digest carried alongside the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphMeta {
    pub node_count: usize,
    pub edge_count: usize,
    /// Hex SHA-256 of the canonical node/edge lines.
    pub digest: String,
    /// Options the graph was built with; `None` for loaded graphs.
    pub build: Option<BuildOptions>,
}

/// Immutable metaphorical concept graph.
///
/// Constructed once, then read-only; the value is `Send + Sync` and any
/// number of threads may query it concurrently.
#[derive(Clone, Debug)]
pub struct MetaphorGraph {
    nodes: Vec<ConceptNode>,
    edges: Vec<Edge>,
    label_index: BTreeMap<String, NodeId>,
    adjacency: Vec<Vec<(NodeId, EdgeKind)>>,
    meta: GraphMeta,
}

impl MetaphorGraph {
    /// Assemble a graph from validated parts, deriving the index,
    /// adjacency, and content digest.
    pub(crate) fn from_parts(
        nodes: Vec<ConceptNode>,
        edges: Vec<Edge>,
        build: Option<BuildOptions>,
    ) -> Result<MetaphorGraph, KgError> {
        let mut label_index = BTreeMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if node.id.index() != i {
                return Err(KgError::InvalidInput(format!(
                    "node ids must be contiguous: expected {i}, found {}",
                    node.id
                )));
            }
            if node.label.is_empty() {
                return Err(KgError::InvalidInput(format!("node {i} has empty label")));
            }
            if node.freq == 0 || node.roles.is_empty() {
                return Err(KgError::InvalidInput(format!(
                    "node {i} violates freq/roles invariants"
                )));
            }
            if label_index.insert(node.label.clone(), node.id).is_some() {
                return Err(KgError::InvalidInput(format!(
                    "duplicate label {:?}",
                    node.label
                )));
            }
        }

        let mut adjacency: Vec<Vec<(NodeId, EdgeKind)>> = vec![Vec::new(); nodes.len()];
        let mut seen = BTreeSet::new();
        for edge in &edges {
            if edge.u >= edge.v {
                return Err(KgError::InvalidInput(format!(
                    "edge endpoints must satisfy u < v, got {} {}",
                    edge.u, edge.v
                )));
            }
            if edge.v.index() >= nodes.len() {
                return Err(KgError::InvalidNodeId(edge.v.0));
            }
            if edge.weight == 0 {
                return Err(KgError::InvalidInput("edge weight must be positive".into()));
            }
            if !seen.insert((edge.u, edge.v, edge.kind)) {
                return Err(KgError::InvalidInput(format!(
                    "duplicate edge {} {} {}",
                    edge.u,
                    edge.v,
                    edge.kind.as_char()
                )));
            }
            adjacency[edge.u.index()].push((edge.v, edge.kind));
            adjacency[edge.v.index()].push((edge.u, edge.kind));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let digest = io::body_digest(&io::encode_body(&nodes, &edges));
        let meta = GraphMeta {
            node_count: nodes.len(),
            edge_count: edges.len(),
            digest,
            build,
        };
        Ok(MetaphorGraph {
            nodes,
            edges,
            label_index,
            adjacency,
            meta,
        })
    }

    pub fn nodes(&self) -> &[ConceptNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&ConceptNode, KgError> {
        self.nodes
            .get(id.index())
            .ok_or(KgError::InvalidNodeId(id.0))
    }

    /// Look up a node by its normalized label.
    pub fn lookup_label(&self, normalized: &str) -> Option<NodeId> {
        self.label_index.get(normalized).copied()
    }

    /// Kind-tagged neighbors of a node, sorted by (id, kind).
    pub fn neighbors(&self, id: NodeId) -> Result<&[(NodeId, EdgeKind)], KgError> {
        self.adjacency
            .get(id.index())
            .map(|v| v.as_slice())
            .ok_or(KgError::InvalidNodeId(id.0))
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn edge_counts_by_kind(&self) -> BTreeMap<EdgeKind, usize> {
        let mut counts = BTreeMap::new();
        for edge in &self.edges {
            *counts.entry(edge.kind).or_insert(0) += 1;
        }
        counts
    }

    /// Degree over all edge kinds.
    pub fn degree(&self, id: NodeId) -> Result<usize, KgError> {
        Ok(self.neighbors(id)?.len())
    }
}
