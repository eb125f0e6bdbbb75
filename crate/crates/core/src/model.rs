//! Attributed IXP bipartite graph.
//!
//! Vertices come in two disjoint classes, IXPs keyed by [`IxpId`] and ASes
//! keyed by [`Asn`]. Edges are membership relations: AS `j` is a member of
//! IXP `i`. Because the two classes live in separate maps and an edge is a
//! `(IxpId, Asn)` pair, AS–AS and IXP–IXP edges cannot be represented.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::net::IpAddr;
use std::str::FromStr;
use std::sync::Arc;

use ipnet::IpNet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Autonomous system number. Always positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Asn(u32);

impl Asn {
    pub fn new(value: u32) -> Option<Self> {
        (value > 0).then_some(Asn(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Asn {
    type Error = String;

    fn try_from(value: u32) -> std::result::Result<Self, Self::Error> {
        Asn::new(value).ok_or_else(|| "AS number must be positive".to_string())
    }
}

impl From<Asn> for u32 {
    fn from(asn: Asn) -> u32 {
        asn.0
    }
}

impl fmt::Display for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AS{}", self.0)
    }
}

/// Accepts `64500`, `AS64500`, `as64500` and the short `A1` form.
impl FromStr for Asn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t
            .strip_prefix("AS")
            .or_else(|| t.strip_prefix("as"))
            .or_else(|| t.strip_prefix("As"))
            .or_else(|| t.strip_prefix('A'))
            .or_else(|| t.strip_prefix('a'))
            .unwrap_or(t);
        let value: u32 = digits
            .parse()
            .map_err(|_| format!("invalid AS number {s:?}"))?;
        Asn::new(value).ok_or_else(|| format!("AS number must be positive, got {s:?}"))
    }
}

/// Opaque IXP identifier. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IxpId(Arc<str>);

impl IxpId {
    pub fn new(id: impl AsRef<str>) -> Self {
        IxpId(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for IxpId {
    fn from(s: &str) -> Self {
        IxpId::new(s)
    }
}

impl fmt::Display for IxpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Ixp,
    As,
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::Ixp => "IXP",
            NodeClass::As => "AS",
        })
    }
}

impl FromStr for NodeClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ixp" => Ok(NodeClass::Ixp),
            "as" => Ok(NodeClass::As),
            other => Err(format!("unknown node class {other:?} (expected ixp or as)")),
        }
    }
}

/// A vertex of either class. IXPs order before ASes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Ixp(IxpId),
    As(Asn),
}

impl NodeId {
    pub fn class(&self) -> NodeClass {
        match self {
            NodeId::Ixp(_) => NodeClass::Ixp,
            NodeId::As(_) => NodeClass::As,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Ixp(id) => write!(f, "{id}"),
            NodeId::As(asn) => write!(f, "{asn}"),
        }
    }
}

impl From<Asn> for NodeId {
    fn from(asn: Asn) -> Self {
        NodeId::As(asn)
    }
}

impl From<IxpId> for NodeId {
    fn from(id: IxpId) -> Self {
        NodeId::Ixp(id)
    }
}

impl From<&IxpId> for NodeId {
    fn from(id: &IxpId) -> Self {
        NodeId::Ixp(id.clone())
    }
}

/// Business type of an AS. `Unknown` covers unclassified networks.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum AsType {
    Content,
    Enterprise,
    Isp,
    #[default]
    Unknown,
}

impl FromStr for AsType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "content" => Ok(AsType::Content),
            "enterprise" => Ok(AsType::Enterprise),
            // CAIDA labels ISPs as transit/access networks.
            "isp" | "transit/access" | "transit" | "access" => Ok(AsType::Isp),
            "unknown" | "" => Ok(AsType::Unknown),
            other => Err(format!("unknown AS type {other:?}")),
        }
    }
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum IxpStatus {
    #[default]
    Active,
    Inactive,
    NotApproved,
}

impl IxpStatus {
    pub fn is_active(self) -> bool {
        self == IxpStatus::Active
    }
}

impl FromStr for IxpStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match norm.as_str() {
            "active" | "ok" => Ok(IxpStatus::Active),
            "inactive" => Ok(IxpStatus::Inactive),
            "notapproved" | "pending" => Ok(IxpStatus::NotApproved),
            _ => Err(format!("unknown IXP status {s:?}")),
        }
    }
}

/// Dataset a membership was observed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Pdb,
    Pch,
    Other,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Pdb => "PDB",
            Source::Pch => "PCH",
            Source::Other => "OTHER",
        })
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pdb" | "peeringdb" => Ok(Source::Pdb),
            "pch" => Ok(Source::Pch),
            "other" => Ok(Source::Other),
            other => Err(format!("unknown source {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub country: String,
    pub city: String,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsNode {
    pub asn: Asn,
    pub as_type: AsType,
    /// Total announced IP prefixes, when known.
    pub prefix_count: Option<u64>,
    pub prefixes: Option<Vec<IpNet>>,
}

impl AsNode {
    pub fn new(asn: Asn) -> Self {
        AsNode {
            asn,
            as_type: AsType::Unknown,
            prefix_count: None,
            prefixes: None,
        }
    }

    pub fn with_type(mut self, as_type: AsType) -> Self {
        self.as_type = as_type;
        self
    }

    pub fn with_prefix_count(mut self, count: u64) -> Self {
        self.prefix_count = Some(count);
        self.prefixes = None;
        self
    }

    pub fn with_prefixes(mut self, prefixes: Vec<IpNet>) -> Self {
        self.prefix_count = Some(prefixes.len() as u64);
        self.prefixes = Some(prefixes);
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(prefixes) = &self.prefixes {
            if self.prefix_count != Some(prefixes.len() as u64) {
                return Err(Error::InvalidInput(format!(
                    "{}: prefix_count does not match the prefix list",
                    self.asn
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IxpNode {
    pub id: IxpId,
    /// One name per source dataset.
    pub names: Vec<String>,
    pub peering_prefixes: Vec<IpNet>,
    pub location: Option<Location>,
    pub status: IxpStatus,
}

impl IxpNode {
    pub fn new(id: impl Into<IxpId>, name: impl Into<String>) -> Self {
        IxpNode {
            id: id.into(),
            names: vec![name.into()],
            peering_prefixes: Vec::new(),
            location: None,
            status: IxpStatus::Active,
        }
    }

    pub fn with_prefixes(mut self, prefixes: Vec<IpNet>) -> Self {
        self.peering_prefixes = prefixes;
        self
    }

    pub fn with_location(mut self, location: Location) -> Self {
        self.location = Some(location);
        self
    }

    /// Whether `ip` falls inside one of the peering LAN prefixes.
    pub fn lan_contains(&self, ip: &IpAddr) -> bool {
        self.peering_prefixes.iter().any(|p| p.contains(ip))
    }

    fn validate(&self) -> Result<()> {
        if self.names.is_empty() {
            return Err(Error::InvalidInput(format!("{}: IXP has no name", self.id)));
        }
        let distinct: BTreeSet<&IpNet> = self.peering_prefixes.iter().collect();
        if distinct.len() != self.peering_prefixes.len() {
            return Err(Error::InvalidInput(format!(
                "{}: duplicate peering prefix",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipEdge {
    pub ixp: IxpId,
    pub asn: Asn,
    /// Address of the member's router on the IXP LAN.
    pub member_ip: Option<IpAddr>,
    pub sources: BTreeSet<Source>,
}

impl MembershipEdge {
    pub fn new(ixp: impl Into<IxpId>, asn: Asn, source: Source) -> Self {
        MembershipEdge {
            ixp: ixp.into(),
            asn,
            member_ip: None,
            sources: BTreeSet::from([source]),
        }
    }

    pub fn with_ip(mut self, ip: IpAddr) -> Self {
        self.member_ip = Some(ip);
        self
    }
}

/// Node and edge counts dropped when extracting the giant component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComponentDiscards {
    pub nodes: usize,
    pub edges: usize,
}

/// The IXP bipartite graph.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BipartiteGraph {
    ixps: BTreeMap<IxpId, IxpNode>,
    ases: BTreeMap<Asn, AsNode>,
    edges: BTreeMap<(IxpId, Asn), MembershipEdge>,
    members: BTreeMap<IxpId, BTreeSet<Asn>>,
    memberships: BTreeMap<Asn, BTreeSet<IxpId>>,
}

impl BipartiteGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_ixp(&mut self, node: IxpNode) -> Result<()> {
        node.validate()?;
        if self.ixps.contains_key(&node.id) {
            return Err(Error::DuplicateNode(NodeId::Ixp(node.id)));
        }
        self.members.insert(node.id.clone(), BTreeSet::new());
        self.ixps.insert(node.id.clone(), node);
        Ok(())
    }

    pub fn add_as(&mut self, node: AsNode) -> Result<()> {
        node.validate()?;
        if self.ases.contains_key(&node.asn) {
            return Err(Error::DuplicateNode(NodeId::As(node.asn)));
        }
        self.memberships.insert(node.asn, BTreeSet::new());
        self.ases.insert(node.asn, node);
        Ok(())
    }

    /// Insert a membership edge. Re-adding an existing `(ixp, asn)` pair
    /// merges the source sets; the first known member IP is kept.
    pub fn add_membership(&mut self, edge: MembershipEdge) -> Result<()> {
        if !self.ixps.contains_key(&edge.ixp) {
            return Err(Error::UnknownEndpoint(NodeId::Ixp(edge.ixp)));
        }
        if !self.ases.contains_key(&edge.asn) {
            return Err(Error::UnknownEndpoint(NodeId::As(edge.asn)));
        }
        if edge.sources.is_empty() {
            return Err(Error::InvalidInput(format!(
                "membership {}–{} has no source",
                edge.ixp, edge.asn
            )));
        }
        let key = (edge.ixp.clone(), edge.asn);
        if let Some(existing) = self.edges.get_mut(&key) {
            existing.sources.extend(edge.sources);
            if existing.member_ip.is_none() {
                existing.member_ip = edge.member_ip;
            }
            return Ok(());
        }
        self.members
            .entry(edge.ixp.clone())
            .or_default()
            .insert(edge.asn);
        self.memberships
            .entry(edge.asn)
            .or_default()
            .insert(edge.ixp.clone());
        self.edges.insert(key, edge);
        Ok(())
    }

    pub fn ixp(&self, id: &IxpId) -> Option<&IxpNode> {
        self.ixps.get(id)
    }

    pub fn as_node(&self, asn: Asn) -> Option<&AsNode> {
        self.ases.get(&asn)
    }

    pub fn ixps(&self) -> impl ExactSizeIterator<Item = &IxpNode> {
        self.ixps.values()
    }

    pub fn ases(&self) -> impl ExactSizeIterator<Item = &AsNode> {
        self.ases.values()
    }

    /// Edges in `(ixp, asn)` order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &MembershipEdge> {
        self.edges.values()
    }

    pub fn edge(&self, ixp: &IxpId, asn: Asn) -> Option<&MembershipEdge> {
        self.edges.get(&(ixp.clone(), asn))
    }

    pub fn has_membership(&self, ixp: &IxpId, asn: Asn) -> bool {
        self.members.get(ixp).is_some_and(|m| m.contains(&asn))
    }

    pub fn ixp_count(&self) -> usize {
        self.ixps.len()
    }

    pub fn as_count(&self) -> usize {
        self.ases.len()
    }

    pub fn node_count(&self) -> usize {
        self.ixps.len() + self.ases.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        match node {
            NodeId::Ixp(id) => self.ixps.contains_key(id),
            NodeId::As(asn) => self.ases.contains_key(asn),
        }
    }

    /// AS members of an IXP.
    pub fn members(&self, ixp: &IxpId) -> Result<&BTreeSet<Asn>> {
        self.members
            .get(ixp)
            .ok_or_else(|| Error::UnknownNode(NodeId::Ixp(ixp.clone())))
    }

    /// IXPs an AS is a member of.
    pub fn memberships(&self, asn: Asn) -> Result<&BTreeSet<IxpId>> {
        self.memberships
            .get(&asn)
            .ok_or(Error::UnknownNode(NodeId::As(asn)))
    }

    /// Number of incident membership edges.
    pub fn degree(&self, node: &NodeId) -> Result<usize> {
        match node {
            NodeId::Ixp(id) => self.members(id).map(BTreeSet::len),
            NodeId::As(asn) => self.memberships(*asn).map(BTreeSet::len),
        }
    }

    pub fn set_as_type(&mut self, asn: Asn, as_type: AsType) -> Result<()> {
        let node = self
            .ases
            .get_mut(&asn)
            .ok_or(Error::UnknownNode(NodeId::As(asn)))?;
        node.as_type = as_type;
        Ok(())
    }

    pub fn set_location(&mut self, ixp: &IxpId, location: Location) -> Result<()> {
        let node = self
            .ixps
            .get_mut(ixp)
            .ok_or_else(|| Error::UnknownNode(NodeId::Ixp(ixp.clone())))?;
        node.location = Some(location);
        Ok(())
    }

    /// Connected components as sorted node lists, in order of their
    /// smallest node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let index = AdjacencyIndex::build(self);
        let n = index.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(index.node_id(v));
                for &w in &index.adj[v] {
                    let w = w as usize;
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Induced subgraph on the largest connected component, measured by
    /// vertex count. Ties go to the component with more edges, then to the
    /// one containing the smallest node id.
    pub fn giant_component(&self) -> Result<(BipartiteGraph, ComponentDiscards)> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let components = self.components();
        let edges_in = |comp: &[NodeId]| -> usize {
            comp.iter()
                .filter_map(|n| match n {
                    NodeId::Ixp(id) => Some(self.members[id].len()),
                    NodeId::As(_) => None,
                })
                .sum()
        };
        // components() yields components ordered by their smallest node, so
        // a strict comparison keeps the earliest on full ties.
        let mut best: Option<(usize, usize, &Vec<NodeId>)> = None;
        for comp in &components {
            let key = (comp.len(), edges_in(comp));
            match best {
                Some((v, e, _)) if (v, e) >= key => {}
                _ => best = Some((key.0, key.1, comp)),
            }
        }
        let (_, _, keep) = best.expect("non-empty graph has a component");
        let keep: BTreeSet<&NodeId> = keep.iter().collect();
        let sub = self.induced(|n| keep.contains(n));
        let discards = ComponentDiscards {
            nodes: self.node_count() - sub.node_count(),
            edges: self.edge_count() - sub.edge_count(),
        };
        Ok((sub, discards))
    }

    /// Subgraph induced by the nodes accepted by `keep`.
    pub fn induced(&self, keep: impl Fn(&NodeId) -> bool) -> BipartiteGraph {
        let mut sub = BipartiteGraph::new();
        for node in self.ixps.values() {
            if keep(&NodeId::Ixp(node.id.clone())) {
                sub.members.insert(node.id.clone(), BTreeSet::new());
                sub.ixps.insert(node.id.clone(), node.clone());
            }
        }
        for node in self.ases.values() {
            if keep(&NodeId::As(node.asn)) {
                sub.memberships.insert(node.asn, BTreeSet::new());
                sub.ases.insert(node.asn, node.clone());
            }
        }
        for edge in self.edges.values() {
            if sub.ixps.contains_key(&edge.ixp) && sub.ases.contains_key(&edge.asn) {
                sub.add_membership(edge.clone())
                    .expect("endpoints present in induced subgraph");
            }
        }
        sub
    }
}

/// Business relationship between two ASes.
///
/// Directional variants are read from the first AS of the queried pair:
/// `CustomerToProvider` for `(a, b)` means `a` is a customer of `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    PeerToPeer,
    CustomerToProvider,
    ProviderToCustomer,
    Unknown,
}

impl Relation {
    pub fn reversed(self) -> Relation {
        match self {
            Relation::CustomerToProvider => Relation::ProviderToCustomer,
            Relation::ProviderToCustomer => Relation::CustomerToProvider,
            other => other,
        }
    }

    pub fn is_known(self) -> bool {
        self != Relation::Unknown
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p2p" | "peer" | "peer_to_peer" | "0" => Ok(Relation::PeerToPeer),
            "c2p" | "customer_to_provider" | "1" => Ok(Relation::CustomerToProvider),
            "p2c" | "provider_to_customer" | "-1" => Ok(Relation::ProviderToCustomer),
            "unknown" | "" => Ok(Relation::Unknown),
            other => Err(format!("unknown relation {other:?}")),
        }
    }
}

/// Peering policy layer over unordered AS pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolicyLayer {
    // keyed (low, high); relation oriented from low to high
    relations: BTreeMap<(Asn, Asn), Relation>,
}

impl PolicyLayer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record the relation of `a` towards `b`. Replaces any earlier entry
    /// for the pair. Self-pairs are ignored.
    pub fn set(&mut self, a: Asn, b: Asn, relation: Relation) {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => {
                self.relations.insert((a, b), relation);
            }
            std::cmp::Ordering::Greater => {
                self.relations.insert((b, a), relation.reversed());
            }
            std::cmp::Ordering::Equal => {}
        }
    }

    /// Relation of `a` towards `b`, if recorded.
    pub fn get(&self, a: Asn, b: Asn) -> Option<Relation> {
        if a <= b {
            self.relations.get(&(a, b)).copied()
        } else {
            self.relations.get(&(b, a)).map(|r| r.reversed())
        }
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Entries as `(low, high, relation of low towards high)`.
    pub fn iter(&self) -> impl Iterator<Item = (Asn, Asn, Relation)> + '_ {
        self.relations.iter().map(|(&(a, b), &r)| (a, b, r))
    }
}

/// Dense integer view of a [`BipartiteGraph`] for traversal-heavy code.
///
/// IXPs occupy indices `0..ixp_count` and ASes the remaining indices, both in
/// sorted id order.
#[derive(Debug)]
pub(crate) struct AdjacencyIndex {
    pub ixps: Vec<IxpId>,
    pub ases: Vec<Asn>,
    pub adj: Vec<Vec<u32>>,
}

impl AdjacencyIndex {
    pub fn build(graph: &BipartiteGraph) -> Self {
        let ixps: Vec<IxpId> = graph.ixps.keys().cloned().collect();
        let ases: Vec<Asn> = graph.ases.keys().copied().collect();
        let ixp_pos: BTreeMap<&IxpId, u32> = ixps
            .iter()
            .enumerate()
            .map(|(i, id)| (id, i as u32))
            .collect();
        let base = ixps.len();
        let as_pos: BTreeMap<Asn, u32> = ases
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, (base + i) as u32))
            .collect();
        let mut adj = vec![Vec::new(); base + ases.len()];
        for edge in graph.edges.values() {
            let i = ixp_pos[&edge.ixp];
            let a = as_pos[&edge.asn];
            adj[i as usize].push(a);
            adj[a as usize].push(i);
        }
        AdjacencyIndex { ixps, ases, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn as_offset(&self) -> usize {
        self.ixps.len()
    }

    pub fn node_id(&self, idx: usize) -> NodeId {
        if idx < self.ixps.len() {
            NodeId::Ixp(self.ixps[idx].clone())
        } else {
            NodeId::As(self.ases[idx - self.ixps.len()])
        }
    }
}

/// Small hand-built graphs shared by tests and documentation.
pub mod fixtures {
    use super::*;

    pub fn asn(n: u32) -> Asn {
        Asn::new(n).expect("positive ASN")
    }

    /// The running example: IXPs X1..X3, ASes 1..4 with memberships
    /// 1→{X1,X3}, 2→{X1,X2}, 3→{X1,X2}, 4→{X2}.
    pub fn toy_graph() -> BipartiteGraph {
        from_memberships(&[
            ("X1", 1),
            ("X3", 1),
            ("X1", 2),
            ("X2", 2),
            ("X1", 3),
            ("X2", 3),
            ("X2", 4),
        ])
    }

    /// Builds a graph whose vertex set is exactly the endpoints of `pairs`.
    pub fn from_memberships(pairs: &[(&str, u32)]) -> BipartiteGraph {
        let mut g = BipartiteGraph::new();
        for (ixp, a) in pairs {
            let id = IxpId::new(ixp);
            if g.ixp(&id).is_none() {
                g.add_ixp(IxpNode::new(id.clone(), *ixp)).unwrap();
            }
            if g.as_node(asn(*a)).is_none() {
                g.add_as(AsNode::new(asn(*a))).unwrap();
            }
            g.add_membership(MembershipEdge::new(id, asn(*a), Source::Pdb))
                .unwrap();
        }
        g
    }
}
