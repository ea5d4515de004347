//! Line-oriented graph persistence with digest verification.
//!
//! ```text
//! MKG1 <node_count> <edge_count> <digest-hex>
//! N <id> <freq> <roles-bitmask> <label-escaped>
//! E <u> <v> <kind-char> <weight>          (u < v)
//! ```
//!
//! Labels escape backslash, newline, and space as `\\`, `\n`, `\s`. The
//! digest is the hex SHA-256 of the node and edge lines exactly as
//! written; loading verifies both counts and digest and refuses the file
//! on any mismatch.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::KgError;
use crate::graph::{ConceptNode, Edge, EdgeKind, MetaphorGraph, NodeId, RoleSet};
use crate::normalize::normalize_label;

const MAGIC: &str = "MKG1";

/// Escape a label for a node line.
pub fn escape_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            ' ' => out.push_str("\\s"),
            other => out.push(other),
        }
    }
    out
}

/// Reverse [`escape_label`]. Rejects dangling or unknown escapes.
pub fn unescape_label(escaped: &str) -> Result<String, KgError> {
    let mut out = String::with_capacity(escaped.len());
    let mut chars = escaped.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('s') => out.push(' '),
            Some(other) => {
                return Err(KgError::format(0, format!("unknown escape \\{other}")));
            }
            None => return Err(KgError::format(0, "dangling backslash in label")),
        }
    }
    Ok(out)
}

/// Canonical node and edge lines, each newline-terminated.
pub(crate) fn encode_body(nodes: &[ConceptNode], edges: &[Edge]) -> String {
    let mut body = String::new();
    for node in nodes {
        writeln!(
            body,
            "N {} {} {} {}",
            node.id,
            node.freq,
            node.roles.bits(),
            escape_label(&node.label)
        )
        .expect("string write");
    }
    for edge in edges {
        writeln!(
            body,
            "E {} {} {} {}",
            edge.u,
            edge.v,
            edge.kind.as_char(),
            edge.weight
        )
        .expect("string write");
    }
    body
}

pub(crate) fn body_digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Serialize a graph to the full file text.
pub fn write_graph(graph: &MetaphorGraph) -> String {
    let body = encode_body(graph.nodes(), graph.edges());
    format!(
        "{MAGIC} {} {} {}\n{body}",
        graph.node_count(),
        graph.edge_count(),
        body_digest(&body)
    )
}

pub fn write_graph_to(graph: &MetaphorGraph, path: &Path) -> Result<(), KgError> {
    std::fs::write(path, write_graph(graph))?;
    Ok(())
}

/// Parse and fully validate a graph file.
pub fn read_graph(text: &str) -> Result<MetaphorGraph, KgError> {
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| KgError::format(1, "missing header line"))?;

    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != MAGIC {
        return Err(KgError::format(
            1,
            format!("expected `{MAGIC} <nodes> <edges> <digest>` header"),
        ));
    }
    let node_count: usize = fields[1]
        .parse()
        .map_err(|_| KgError::format(1, "bad node count"))?;
    let edge_count: usize = fields[2]
        .parse()
        .map_err(|_| KgError::format(1, "bad edge count"))?;
    let header_digest = fields[3];

    let actual = body_digest(body);
    if actual != header_digest {
        return Err(KgError::DigestMismatch {
            header: header_digest.to_string(),
            actual,
        });
    }

    let mut nodes: Vec<ConceptNode> = Vec::with_capacity(node_count);
    let mut edges: Vec<Edge> = Vec::with_capacity(edge_count);
    for (i, line) in body.lines().enumerate() {
        let line_no = i + 2;
        let mut parts = line.split(' ');
        match parts.next() {
            Some("N") => {
                if !edges.is_empty() {
                    return Err(KgError::format(line_no, "node line after edge lines"));
                }
                let id: u32 = next_field(&mut parts, line_no, "node id")?;
                let freq: u32 = next_field(&mut parts, line_no, "freq")?;
                let bits: u8 = next_field(&mut parts, line_no, "roles bitmask")?;
                let roles = RoleSet::from_bits(bits)
                    .ok_or_else(|| KgError::format(line_no, "roles bitmask out of range"))?;
                let escaped = parts
                    .next()
                    .ok_or_else(|| KgError::format(line_no, "missing label"))?;
                if parts.next().is_some() {
                    return Err(KgError::format(line_no, "trailing fields on node line"));
                }
                let label = unescape_label(escaped)
                    .map_err(|_| KgError::format(line_no, "bad label escape"))?;
                if label.is_empty() || label != normalize_label(&label) {
                    return Err(KgError::format(line_no, "label is not in normalized form"));
                }
                if freq == 0 {
                    return Err(KgError::format(line_no, "freq must be >= 1"));
                }
                let raw_labels = std::iter::once(label.clone()).collect();
                nodes.push(ConceptNode {
                    id: NodeId(id),
                    label,
                    raw_labels,
                    roles,
                    freq,
                });
            }
            Some("E") => {
                let u: u32 = next_field(&mut parts, line_no, "edge u")?;
                let v: u32 = next_field(&mut parts, line_no, "edge v")?;
                let kind_field = parts
                    .next()
                    .ok_or_else(|| KgError::format(line_no, "missing edge kind"))?;
                let mut kind_chars = kind_field.chars();
                let kind = kind_chars
                    .next()
                    .and_then(EdgeKind::from_char)
                    .filter(|_| kind_chars.next().is_none())
                    .ok_or_else(|| KgError::format(line_no, "edge kind must be m, c, or s"))?;
                let weight: u32 = next_field(&mut parts, line_no, "edge weight")?;
                if parts.next().is_some() {
                    return Err(KgError::format(line_no, "trailing fields on edge line"));
                }
                if u >= v {
                    return Err(KgError::format(line_no, "edge requires u < v"));
                }
                edges.push(Edge {
                    u: NodeId(u),
                    v: NodeId(v),
                    kind,
                    weight,
                });
            }
            Some(other) => {
                return Err(KgError::format(
                    line_no,
                    format!("unknown record type {other:?}"),
                ));
            }
            None => return Err(KgError::format(line_no, "empty line")),
        }
    }

    if nodes.len() != node_count {
        return Err(KgError::format(
            1,
            format!("header says {node_count} nodes, body has {}", nodes.len()),
        ));
    }
    if edges.len() != edge_count {
        return Err(KgError::format(
            1,
            format!("header says {edge_count} edges, body has {}", edges.len()),
        ));
    }

    MetaphorGraph::from_parts(nodes, edges, None)
}

pub fn read_graph_from(path: &Path) -> Result<MetaphorGraph, KgError> {
    let text = std::fs::read_to_string(path)?;
    read_graph(&text)
}

fn next_field<T: std::str::FromStr>(
    parts: &mut std::str::Split<'_, char>,
    line: usize,
    what: &str,
) -> Result<T, KgError> {
    parts
        .next()
        .ok_or_else(|| KgError::format(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| KgError::format(line, format!("bad {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{build_graph, BuildOptions, ConceptPair};
    use proptest::prelude::*;

    #[test]
    fn round_trip_preserves_structure_and_digest() {
        let built = build_graph(
            &[
                ConceptPair::new("time", "river", "d1"),
                ConceptPair::new("old age", "sunset", "d1"),
            ],
            &BuildOptions::default(),
        )
        .unwrap();
        let text = write_graph(&built.graph);
        let loaded = read_graph(&text).unwrap();
        assert_eq!(loaded.node_count(), built.graph.node_count());
        assert_eq!(loaded.edge_count(), built.graph.edge_count());
        assert_eq!(loaded.meta().digest, built.graph.meta().digest);
        assert_eq!(write_graph(&loaded), text);
    }

    #[test]
    fn tampered_body_is_rejected() {
        let built = build_graph(
            &[ConceptPair::new("time", "river", "d1")],
            &BuildOptions::default(),
        )
        .unwrap();
        let text = write_graph(&built.graph);
        let tampered = text.replace("N 0 1", "N 0 9");
        assert!(matches!(
            read_graph(&tampered),
            Err(KgError::DigestMismatch { .. })
        ));
    }

    #[test]
    fn wrong_counts_are_rejected() {
        let built = build_graph(
            &[ConceptPair::new("time", "river", "d1")],
            &BuildOptions::default(),
        )
        .unwrap();
        let text = write_graph(&built.graph);
        let (header, body) = text.split_once('\n').unwrap();
        let mut fields: Vec<&str> = header.split(' ').collect();
        fields[1] = "9";
        let forged = format!("{}\n{}", fields.join(" "), body);
        assert!(read_graph(&forged).is_err());
    }

    #[test]
    fn truncated_file_is_rejected() {
        assert!(read_graph("").is_err());
        assert!(read_graph("MKG1 0 0").is_err());
    }

    proptest! {
        #[test]
        fn escape_round_trips(label in "[a-z \\\\n]{0,24}") {
            let escaped = escape_label(&label);
            prop_assert!(!escaped.contains(' '));
            prop_assert_eq!(unescape_label(&escaped).unwrap(), label);
        }
    }
}
