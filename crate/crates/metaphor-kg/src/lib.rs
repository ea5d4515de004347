//! Metaphorical concept graph.
//!
//! Builds an immutable graph of normalized concepts from extracted
//! (source, target) metaphor pairs, serves h-hop common-connection
//! queries over it, and persists it in a line-oriented, digest-checked
//! text format.
//!
//! Construction is deterministic: node ids are assigned by sorted label
//! order, so the same pair multiset always produces a byte-identical
//! graph file regardless of input order. After build the graph is
//! immutable and safe to share across reader threads.

mod build;
mod error;
mod graph;
mod io;
mod normalize;
mod query;

pub use build::{
    build_graph, build_graph_with_similarity, BuildOptions, ConceptPair, GraphBuild, PairReject,
    RejectReason, SimilarityProvider,
};
pub use error::KgError;
pub use graph::{ConceptNode, Edge, EdgeKind, GraphMeta, MetaphorGraph, NodeId, RoleSet};
pub use io::{escape_label, read_graph, read_graph_from, unescape_label, write_graph, write_graph_to};
pub use normalize::normalize_label;
pub use query::{
    hop_ball, match_keywords, query_common_connection, query_with_options, MatchOptions, QueryMode,
    RetrievalEntry, RetrievalParams, RetrievalResult,
};
