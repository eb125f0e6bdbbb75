//! On-disk graph formats.
//!
//! The canonical graph file is a versioned JSON document with every array
//! sorted by key:
//!
//! ```json
//! {"version": 1, "ixps": [...], "ases": [...], "edges": [...]}
//! ```
//!
//! The edge list format has one `ixp_id<TAB>asn` line per membership,
//! sorted by `(ixp_id, asn)`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AsNode, Asn, BipartiteGraph, IxpId, IxpNode, MembershipEdge, Source};

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphDocument {
    version: u32,
    ixps: Vec<IxpNode>,
    ases: Vec<AsNode>,
    edges: Vec<MembershipEdge>,
}

pub fn to_json(graph: &BipartiteGraph) -> String {
    let doc = GraphDocument {
        version: GRAPH_FORMAT_VERSION,
        ixps: graph.ixps().cloned().collect(),
        ases: graph.ases().cloned().collect(),
        edges: graph.edges().cloned().collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph document serializes");
    text.push('\n');
    text
}

pub fn from_json(text: &str, origin: &Path) -> Result<BipartiteGraph> {
    let doc: GraphDocument = serde_json::from_str(text)
        .map_err(|e| Error::format(origin, format!("invalid graph file: {e}")))?;
    if doc.version != GRAPH_FORMAT_VERSION {
        return Err(Error::format(
            origin,
            format!("unsupported graph file version {}", doc.version),
        ));
    }
    let mut graph = BipartiteGraph::new();
    for ixp in doc.ixps {
        graph.add_ixp(ixp)?;
    }
    for node in doc.ases {
        graph.add_as(node)?;
    }
    for edge in doc.edges {
        graph.add_membership(edge)?;
    }
    Ok(graph)
}

pub fn to_edgelist(graph: &BipartiteGraph) -> String {
    let mut out = String::new();
    for e in graph.edges() {
        out.push_str(&format!("{}\t{}\n", e.ixp, e.asn.get()));
    }
    out
}

/// Rebuild a bare graph from an edge list. IXPs are named by their id and
/// memberships are attributed to [`Source::Other`].
pub fn from_edgelist(text: &str, origin: &Path) -> Result<BipartiteGraph> {
    let mut graph = BipartiteGraph::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::format(origin, format!("line {}: expected `ixp_id<TAB>asn`", n + 1));
        let (ixp, asn) = line.split_once('\t').ok_or_else(bad)?;
        let asn: Asn = asn.parse().map_err(|_| bad())?;
        let id = IxpId::new(ixp.trim());
        if graph.ixp(&id).is_none() {
            graph.add_ixp(IxpNode::new(id.clone(), ixp.trim()))?;
        }
        if graph.as_node(asn).is_none() {
            graph.add_as(AsNode::new(asn))?;
        }
        graph.add_membership(MembershipEdge::new(id, asn, Source::Other))?;
    }
    Ok(graph)
}

pub fn read_graph(path: &Path) -> Result<BipartiteGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text, path)
}

pub fn write_graph(path: &Path, graph: &BipartiteGraph) -> Result<()> {
    fs::write(path, to_json(graph)).map_err(|e| Error::io(path, e))
}
