//! One-mode projections of the bipartite graph.
//!
//! Projecting onto the IXPs links two IXPs once for every AS that is a
//! member of both; projecting onto the ASes links two ASes once for every
//! IXP they share. Parallel edges are kept and labeled by the shared
//! neighbor, so the multiplicity of a pair is the size of its label set.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Asn, BipartiteGraph, NodeClass, NodeId, PolicyLayer};

/// Undirected multigraph on one vertex class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    node_class: NodeClass,
    nodes: BTreeSet<NodeId>,
    // (u, v) with u < v → shared neighbors
    edges: BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>>,
}

impl Multigraph {
    pub fn node_class(&self) -> NodeClass {
        self.node_class
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.nodes.contains(node)
    }

    /// Node pairs with at least one edge, with their shared-neighbor labels.
    pub fn pairs(&self) -> impl Iterator<Item = (&NodeId, &NodeId, &BTreeSet<NodeId>)> {
        self.edges.iter().map(|((u, v), via)| (u, v, via))
    }

    /// Every parallel edge as a `(u, v, via)` triple with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, &NodeId)> {
        self.pairs()
            .flat_map(|(u, v, vias)| vias.iter().map(move |via| (u, v, via)))
    }

    /// Number of node pairs joined by at least one edge.
    pub fn pair_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of parallel edges.
    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeSet::len).sum()
    }

    pub fn multiplicity(&self, u: &NodeId, v: &NodeId) -> Result<usize> {
        for n in [u, v] {
            if !self.nodes.contains(n) {
                return Err(Error::UnknownNode(n.clone()));
            }
        }
        Ok(self.edges.get(&ordered(u, v)).map_or(0, BTreeSet::len))
    }

    /// Adjacency lists of the simple graph obtained by collapsing parallel
    /// edges, indexed in node order.
    pub fn simple_adjacency(&self) -> (Vec<NodeId>, Vec<Vec<usize>>) {
        let nodes: Vec<NodeId> = self.nodes.iter().cloned().collect();
        let pos: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); nodes.len()];
        for (u, v) in self.edges.keys() {
            let (i, j) = (pos[u], pos[v]);
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        (nodes, adj)
    }
}

fn ordered(u: &NodeId, v: &NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u.clone(), v.clone())
    } else {
        (v.clone(), u.clone())
    }
}

/// Project `graph` onto one vertex class. Every node of the class is kept,
/// including those with no projected edge.
pub fn project(graph: &BipartiteGraph, node_class: NodeClass) -> Result<Multigraph> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut edges: BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>> = BTreeMap::new();
    let nodes: BTreeSet<NodeId>;
    match node_class {
        NodeClass::Ixp => {
            nodes = graph.ixps().map(|x| NodeId::Ixp(x.id.clone())).collect();
            for node in graph.ases() {
                let via = NodeId::As(node.asn);
                let ixps: Vec<NodeId> = graph
                    .memberships(node.asn)?
                    .iter()
                    .map(NodeId::from)
                    .collect();
                add_clique(&mut edges, &ixps, &via);
            }
        }
        NodeClass::As => {
            nodes = graph.ases().map(|a| NodeId::As(a.asn)).collect();
            for node in graph.ixps() {
                let via = NodeId::Ixp(node.id.clone());
                let ases: Vec<NodeId> = graph
                    .members(&node.id)?
                    .iter()
                    .map(|&a| NodeId::As(a))
                    .collect();
                add_clique(&mut edges, &ases, &via);
            }
        }
    }
    Ok(Multigraph {
        node_class,
        nodes,
        edges,
    })
}

// `group` is sorted, so (group[i], group[j]) with i < j is already canonical.
fn add_clique(
    edges: &mut BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>>,
    group: &[NodeId],
    via: &NodeId,
) {
    for (i, u) in group.iter().enumerate() {
        for v in &group[i + 1..] {
            edges
                .entry((u.clone(), v.clone()))
                .or_default()
                .insert(via.clone());
        }
    }
}

/// How pairs without a confirmed relation are treated by [`apply_policy`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnknownRelations {
    #[default]
    Drop,
    Keep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PolicyFilterReport {
    pub dropped_pairs: usize,
    pub dropped_edges: usize,
}

/// Keep only AS pairs whose relation is confirmed by the policy layer.
pub fn apply_policy(
    mg: &Multigraph,
    policy: &PolicyLayer,
) -> Result<(Multigraph, PolicyFilterReport)> {
    apply_policy_with(mg, policy, UnknownRelations::Drop)
}

/// [`apply_policy`] with explicit handling of pairs whose relation is
/// `Unknown` or absent.
pub fn apply_policy_with(
    mg: &Multigraph,
    policy: &PolicyLayer,
    unknown: UnknownRelations,
) -> Result<(Multigraph, PolicyFilterReport)> {
    if mg.node_class != NodeClass::As {
        return Err(Error::WrongNodeClass {
            expected: NodeClass::As,
        });
    }
    let mut report = PolicyFilterReport::default();
    let mut edges = BTreeMap::new();
    for ((u, v), vias) in &mg.edges {
        let (NodeId::As(a), NodeId::As(b)) = (u, v) else {
            unreachable!("AS multigraph holds AS nodes only");
        };
        if keeps(policy, *a, *b, unknown) {
            edges.insert((u.clone(), v.clone()), vias.clone());
        } else {
            report.dropped_pairs += 1;
            report.dropped_edges += vias.len();
        }
    }
    Ok((
        Multigraph {
            node_class: NodeClass::As,
            nodes: mg.nodes.clone(),
            edges,
        },
        report,
    ))
}

fn keeps(policy: &PolicyLayer, a: Asn, b: Asn, unknown: UnknownRelations) -> bool {
    match policy.get(a, b) {
        Some(rel) if rel.is_known() => true,
        _ => unknown == UnknownRelations::Keep,
    }
}
