//! Membership dataset ingestion.
//!
//! Two exported membership datasets (PeeringDB and Packet Clearing House)
//! share the same CSV layout:
//!
//! ```text
//! source,ixp_key,ixp_name,ixp_prefixes,asn,member_ip,status,as_type,as_prefix_count
//! ```
//!
//! `ixp_prefixes` is a `;`-separated CIDR list. Optional columns may be
//! left empty. The two sources do not share IXP identifiers, so IXPs are
//! unified by peering LAN prefix and by normalized name before the
//! sanitization pipeline turns the rows into a [`BipartiteGraph`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::net::IpAddr;
use std::path::Path;

use ipnet::IpNet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    AsNode, AsType, Asn, BipartiteGraph, IxpId, IxpNode, IxpStatus, Location, MembershipEdge,
    Source,
};

pub const DATASET_HEADER: [&str; 9] = [
    "source",
    "ixp_key",
    "ixp_name",
    "ixp_prefixes",
    "asn",
    "member_ip",
    "status",
    "as_type",
    "as_prefix_count",
];
pub const AS_TYPES_HEADER: [&str; 2] = ["asn", "as_type"];
pub const LOCATIONS_HEADER: [&str; 5] = ["ixp_id", "country", "city", "lat", "lon"];

/// One raw membership row.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipRecord {
    pub source: Source,
    pub ixp_key: String,
    pub ixp_name: String,
    pub ixp_prefixes: Vec<IpNet>,
    pub asn: Asn,
    pub member_ip: Option<IpAddr>,
    pub status: IxpStatus,
    pub as_type: Option<AsType>,
    pub as_prefix_count: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedDataset {
    pub records: Vec<MembershipRecord>,
    /// Rows that could not be parsed and were skipped.
    pub parse_errors: usize,
}

pub fn parse_dataset(path: &Path, source: Source) -> Result<ParsedDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_from(file, source, path)
}

/// Parse a dataset from any reader; `origin` is used in error messages.
pub fn parse_dataset_from<R: Read>(
    reader: R,
    source: Source,
    origin: &Path,
) -> Result<ParsedDataset> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &DATASET_HEADER, origin)?;
    let mut out = ParsedDataset::default();
    for row in rdr.records() {
        match row
            .map_err(|e| e.to_string())
            .and_then(|r| parse_record(&r, source))
        {
            Ok(rec) => out.records.push(rec),
            Err(_) => out.parse_errors += 1,
        }
    }
    Ok(out)
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], origin: &Path) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| Error::format(origin, format!("unreadable header: {e}")))?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(Error::format(
            origin,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

fn opt(field: &str) -> Option<&str> {
    (!field.is_empty()).then_some(field)
}

fn parse_prefix(s: &str) -> std::result::Result<IpNet, String> {
    s.parse::<IpNet>()
        .map(|n| n.trunc())
        .map_err(|_| format!("invalid CIDR {s:?}"))
}

fn parse_record(
    row: &csv::StringRecord,
    source: Source,
) -> std::result::Result<MembershipRecord, String> {
    if row.len() != DATASET_HEADER.len() {
        return Err(format!(
            "expected {} fields, got {}",
            DATASET_HEADER.len(),
            row.len()
        ));
    }
    if let Some(tag) = opt(&row[0]) {
        let declared: Source = tag.parse()?;
        if declared != source {
            return Err(format!("row declares source {declared}, expected {source}"));
        }
    }
    let ixp_key = row[1].to_string();
    if ixp_key.is_empty() {
        return Err("empty ixp_key".into());
    }
    let ixp_prefixes = row[3]
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_prefix)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MembershipRecord {
        source,
        ixp_key,
        ixp_name: row[2].to_string(),
        ixp_prefixes,
        asn: row[4].parse()?,
        member_ip: opt(&row[5])
            .map(|s| s.parse().map_err(|_| format!("invalid IP {s:?}")))
            .transpose()?,
        status: row[6].parse()?,
        as_type: opt(&row[7]).map(str::parse).transpose()?,
        as_prefix_count: opt(&row[8])
            .map(|s| s.parse().map_err(|_| format!("invalid prefix count {s:?}")))
            .transpose()?,
    })
}

/// Lowercase, trim, and collapse runs of whitespace and `-_.,` into one
/// space.
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_gap = false;
    for c in name.trim().chars() {
        if c.is_whitespace() || matches!(c, '-' | '_' | '.' | ',') {
            pending_gap = true;
            continue;
        }
        if pending_gap && !out.is_empty() {
            out.push(' ');
        }
        pending_gap = false;
        out.extend(c.to_lowercase());
    }
    out
}

/// Stable textual key of a source-local IXP, e.g. `PDB:26`.
pub fn source_key(source: Source, ixp_key: &str) -> String {
    format!("{source}:{ixp_key}")
}

/// An IXP after cross-source unification.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedIxp {
    pub id: IxpId,
    /// Distinct names, in order of source key.
    pub names: Vec<String>,
    pub prefixes: Vec<IpNet>,
    /// `Active` only if no constituent row says otherwise.
    pub status: IxpStatus,
    pub source_keys: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MergedIxps {
    pub ixps: BTreeMap<IxpId, MergedIxp>,
    by_source: BTreeMap<(Source, String), IxpId>,
}

impl MergedIxps {
    pub fn unified_id(&self, source: Source, ixp_key: &str) -> Option<&IxpId> {
        self.by_source.get(&(source, ixp_key.to_string()))
    }

    pub fn len(&self) -> usize {
        self.ixps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ixps.is_empty()
    }
}

struct LocalIxp {
    source: Source,
    key: String,
    skey: String,
    name: String,
    prefixes: BTreeSet<IpNet>,
    status: IxpStatus,
}

fn worse(a: IxpStatus, b: IxpStatus) -> IxpStatus {
    match (a, b) {
        (IxpStatus::Inactive, _) | (_, IxpStatus::Inactive) => IxpStatus::Inactive,
        (IxpStatus::NotApproved, _) | (_, IxpStatus::NotApproved) => IxpStatus::NotApproved,
        _ => IxpStatus::Active,
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Unify the IXPs of both datasets.
///
/// Two source-local IXPs match when a peering prefix of one equals or
/// contains a prefix of the other, or when their normalized names are
/// equal. Unified IXPs are the transitive closure of the match relation and
/// are numbered `IXP001`, `IXP002`, ... in order of their smallest source
/// key.
pub fn merge_ixp_lists(pdb: &[MembershipRecord], pch: &[MembershipRecord]) -> MergedIxps {
    let mut locals: Vec<LocalIxp> = Vec::new();
    let mut index: HashMap<(Source, String), usize> = HashMap::new();
    for rec in pdb.iter().chain(pch) {
        let i = *index
            .entry((rec.source, rec.ixp_key.clone()))
            .or_insert_with(|| {
                locals.push(LocalIxp {
                    source: rec.source,
                    key: rec.ixp_key.clone(),
                    skey: source_key(rec.source, &rec.ixp_key),
                    name: String::new(),
                    prefixes: BTreeSet::new(),
                    status: IxpStatus::Active,
                });
                locals.len() - 1
            });
        let local = &mut locals[i];
        if local.name.is_empty() {
            local.name = rec.ixp_name.clone();
        }
        local.prefixes.extend(rec.ixp_prefixes.iter().copied());
        local.status = worse(local.status, rec.status);
    }

    let mut sets = DisjointSets::new(locals.len());
    let mut by_name: HashMap<String, usize> = HashMap::new();
    for (i, local) in locals.iter().enumerate() {
        let norm = normalize_name(&local.name);
        if norm.is_empty() {
            continue;
        }
        match by_name.get(&norm) {
            Some(&j) => sets.union(i, j),
            None => {
                by_name.insert(norm, i);
            }
        }
    }
    let all_prefixes: Vec<(IpNet, usize)> = locals
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.prefixes.iter().map(move |&p| (p, i)))
        .collect();
    for (k, &(p, i)) in all_prefixes.iter().enumerate() {
        for &(q, j) in &all_prefixes[k + 1..] {
            if i != j && (p.contains(&q) || q.contains(&p)) {
                sets.union(i, j);
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..locals.len() {
        groups.entry(sets.find(i)).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut groups {
        g.sort_by(|&a, &b| locals[a].skey.cmp(&locals[b].skey));
    }
    groups.sort_by(|a, b| locals[a[0]].skey.cmp(&locals[b[0]].skey));

    let width = groups.len().to_string().len().max(3);
    let mut merged = MergedIxps::default();
    for (n, group) in groups.iter().enumerate() {
        let id = IxpId::new(format!("IXP{:0width$}", n + 1));
        let mut names: Vec<String> = Vec::new();
        let mut prefixes = BTreeSet::new();
        let mut status = IxpStatus::Active;
        for &i in group {
            let l = &locals[i];
            if !l.name.is_empty() && !names.contains(&l.name) {
                names.push(l.name.clone());
            }
            prefixes.extend(l.prefixes.iter().copied());
            status = worse(status, l.status);
            merged
                .by_source
                .insert((l.source, l.key.clone()), id.clone());
        }
        if names.is_empty() {
            names.push(id.to_string());
        }
        merged.ixps.insert(
            id.clone(),
            MergedIxp {
                id,
                names,
                prefixes: prefixes.into_iter().collect(),
                status,
                source_keys: group.iter().map(|&i| locals[i].skey.clone()).collect(),
            },
        );
    }
    merged
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    ParseError,
    InactiveIxp,
    IpInconsistent,
    DuplicateCollapsed,
    NotInGiantComponent,
}

impl DiscardReason {
    pub const ALL: [DiscardReason; 5] = [
        DiscardReason::ParseError,
        DiscardReason::InactiveIxp,
        DiscardReason::IpInconsistent,
        DiscardReason::DuplicateCollapsed,
        DiscardReason::NotInGiantComponent,
    ];
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscardReason::ParseError => "parse_error",
            DiscardReason::InactiveIxp => "inactive_ixp",
            DiscardReason::IpInconsistent => "ip_inconsistent",
            DiscardReason::DuplicateCollapsed => "duplicate_collapsed",
            DiscardReason::NotInGiantComponent => "not_in_giant_component",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReasonCount {
    pub nodes: usize,
    pub edges: usize,
}

/// Tally of what the pipeline dropped and why.
///
/// Edge totals count raw rows (including unparsable ones), so collapsing
/// duplicate rows into one edge is itself a discard. A node left without
/// edges by a step is discarded under that step's reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscardReport {
    pub nodes_total_pre: usize,
    pub edges_total_pre: usize,
    pub nodes_discarded: usize,
    pub edges_discarded: usize,
    pub reasons: BTreeMap<DiscardReason, ReasonCount>,
}

impl DiscardReport {
    fn new(nodes_total_pre: usize, edges_total_pre: usize) -> Self {
        DiscardReport {
            nodes_total_pre,
            edges_total_pre,
            nodes_discarded: 0,
            edges_discarded: 0,
            reasons: DiscardReason::ALL
                .iter()
                .map(|&r| (r, ReasonCount::default()))
                .collect(),
        }
    }

    fn add(&mut self, reason: DiscardReason, nodes: usize, edges: usize) {
        let c = self.reasons.entry(reason).or_default();
        c.nodes += nodes;
        c.edges += edges;
        self.nodes_discarded += nodes;
        self.edges_discarded += edges;
    }

    pub fn reason(&self, reason: DiscardReason) -> ReasonCount {
        self.reasons.get(&reason).copied().unwrap_or_default()
    }
}

impl fmt::Display for DiscardReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |part: usize, whole: usize| {
            if whole == 0 {
                0.0
            } else {
                100.0 * part as f64 / whole as f64
            }
        };
        writeln!(
            f,
            "nodes: {} before, {} discarded ({:.1}%), {} kept",
            self.nodes_total_pre,
            self.nodes_discarded,
            pct(self.nodes_discarded, self.nodes_total_pre),
            self.nodes_total_pre - self.nodes_discarded
        )?;
        writeln!(
            f,
            "edges: {} before, {} discarded ({:.1}%), {} kept",
            self.edges_total_pre,
            self.edges_discarded,
            pct(self.edges_discarded, self.edges_total_pre),
            self.edges_total_pre - self.edges_discarded
        )?;
        for (reason, c) in &self.reasons {
            writeln!(f, "  {reason}: {} nodes, {} edges", c.nodes, c.edges)?;
        }
        Ok(())
    }
}

/// Run the sanitization pipeline over merged records.
///
/// Steps, in order: drop inactive or not-approved IXPs; drop memberships
/// whose member IP lies outside every peering prefix of the IXP; collapse
/// duplicate `(ixp, asn)` rows; keep the giant component. Rows without a
/// member IP are kept.
pub fn sanitize(
    records: &[MembershipRecord],
    merged: &MergedIxps,
    parse_errors: usize,
) -> Result<(BipartiteGraph, DiscardReport)> {
    // Resolve every row to its unified IXP.
    let rows: Vec<(&IxpId, &MembershipRecord)> = records
        .iter()
        .map(|r| {
            merged
                .unified_id(r.source, &r.ixp_key)
                .map(|id| (id, r))
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "IXP {} missing from merged list",
                        source_key(r.source, &r.ixp_key)
                    ))
                })
        })
        .collect::<Result<_>>()?;

    let all_ases: BTreeSet<Asn> = records.iter().map(|r| r.asn).collect();
    let mut report =
        DiscardReport::new(merged.len() + all_ases.len(), records.len() + parse_errors);
    report.add(DiscardReason::ParseError, 0, parse_errors);

    let endpoints = |rows: &[(&IxpId, &MembershipRecord)]| -> (BTreeSet<IxpId>, BTreeSet<Asn>) {
        (
            rows.iter().map(|(id, _)| (*id).clone()).collect(),
            rows.iter().map(|(_, r)| r.asn).collect(),
        )
    };

    // (1) inactive IXPs
    let inactive: BTreeSet<&IxpId> = merged
        .ixps
        .values()
        .filter(|x| !x.status.is_active())
        .map(|x| &x.id)
        .collect();
    let (step1, dropped): (Vec<_>, Vec<_>) =
        rows.into_iter().partition(|(id, _)| !inactive.contains(id));
    let (ixps_after1, ases_after1) = endpoints(&step1);
    report.add(
        DiscardReason::InactiveIxp,
        inactive.len() + all_ases.difference(&ases_after1).count(),
        dropped.len(),
    );

    // (2) member IP outside the peering LAN
    let (step2, dropped): (Vec<_>, Vec<_>) =
        step1.into_iter().partition(|(id, r)| match r.member_ip {
            None => true,
            Some(ip) => merged.ixps[*id].prefixes.iter().any(|p| p.contains(&ip)),
        });
    let (ixps_after2, ases_after2) = endpoints(&step2);
    report.add(
        DiscardReason::IpInconsistent,
        ixps_after1.difference(&ixps_after2).count() + ases_after1.difference(&ases_after2).count(),
        dropped.len(),
    );

    // (3) duplicate memberships
    let mut graph = BipartiteGraph::new();
    for id in &ixps_after2 {
        let m = &merged.ixps[id];
        graph.add_ixp(IxpNode {
            id: m.id.clone(),
            names: m.names.clone(),
            peering_prefixes: m.prefixes.clone(),
            location: None,
            status: m.status,
        })?;
    }
    for &asn in &ases_after2 {
        graph.add_as(as_node_from(records, asn))?;
    }
    for (id, r) in &step2 {
        let mut edge = MembershipEdge::new((*id).clone(), r.asn, r.source);
        edge.member_ip = r.member_ip;
        graph.add_membership(edge)?;
    }
    report.add(
        DiscardReason::DuplicateCollapsed,
        0,
        step2.len() - graph.edge_count(),
    );

    // (4) giant component
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let (giant, discards) = graph.giant_component()?;
    report.add(
        DiscardReason::NotInGiantComponent,
        discards.nodes,
        discards.edges,
    );
    Ok((giant, report))
}

fn as_node_from(records: &[MembershipRecord], asn: Asn) -> AsNode {
    let mut node = AsNode::new(asn);
    let rows = records.iter().filter(|r| r.asn == asn);
    if let Some(t) = rows
        .clone()
        .find_map(|r| r.as_type.filter(|t| *t != AsType::Unknown))
    {
        node.as_type = t;
    }
    if let Some(c) = rows.clone().find_map(|r| r.as_prefix_count) {
        node.prefix_count = Some(c);
    }
    node
}

/// Merge and sanitize two parsed datasets into a graph.
pub fn build_graph(
    pdb: &ParsedDataset,
    pch: &ParsedDataset,
) -> Result<(BipartiteGraph, DiscardReport)> {
    let merged = merge_ixp_lists(&pdb.records, &pch.records);
    let records: Vec<MembershipRecord> = pdb.records.iter().chain(&pch.records).cloned().collect();
    sanitize(&records, &merged, pdb.parse_errors + pch.parse_errors)
}

/// Outcome of applying an attribute file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AttributeReport {
    pub applied: usize,
    /// Rows naming an AS or IXP that is not in the graph.
    pub unknown_ids: usize,
    pub malformed_rows: usize,
}

impl AttributeReport {
    fn merge(self, other: AttributeReport) -> Self {
        AttributeReport {
            applied: self.applied + other.applied,
            unknown_ids: self.unknown_ids + other.unknown_ids,
            malformed_rows: self.malformed_rows + other.malformed_rows,
        }
    }
}

/// Attach AS types and IXP locations from optional attribute files.
pub fn attach_attributes(
    graph: &mut BipartiteGraph,
    as_types: Option<&Path>,
    locations: Option<&Path>,
) -> Result<AttributeReport> {
    let mut report = AttributeReport::default();
    if let Some(path) = as_types {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        report = report.merge(attach_as_types(graph, file, path)?);
    }
    if let Some(path) = locations {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        report = report.merge(attach_locations(graph, file, path)?);
    }
    Ok(report)
}

// A zero-byte attribute file is treated as having no rows.
fn attribute_rows<R: Read>(
    reader: R,
    header: &[&str],
    origin: &Path,
) -> Result<Option<csv::Reader<R>>> {
    let mut rdr = csv_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| Error::format(origin, format!("unreadable header: {e}")))?;
    if found.is_empty() {
        return Ok(None);
    }
    check_header(&mut rdr, header, origin)?;
    Ok(Some(rdr))
}

pub fn attach_as_types<R: Read>(
    graph: &mut BipartiteGraph,
    reader: R,
    origin: &Path,
) -> Result<AttributeReport> {
    let mut report = AttributeReport::default();
    let Some(mut rdr) = attribute_rows(reader, &AS_TYPES_HEADER, origin)? else {
        return Ok(report);
    };
    for row in rdr.records() {
        let parsed = row.ok().filter(|r| r.len() == 2).and_then(|r| {
            let asn: Asn = r[0].parse().ok()?;
            let t: AsType = r[1].parse().ok()?;
            Some((asn, t))
        });
        match parsed {
            None => report.malformed_rows += 1,
            Some((asn, t)) => match graph.set_as_type(asn, t) {
                Ok(()) => report.applied += 1,
                Err(_) => report.unknown_ids += 1,
            },
        }
    }
    Ok(report)
}

pub fn attach_locations<R: Read>(
    graph: &mut BipartiteGraph,
    reader: R,
    origin: &Path,
) -> Result<AttributeReport> {
    let mut report = AttributeReport::default();
    let Some(mut rdr) = attribute_rows(reader, &LOCATIONS_HEADER, origin)? else {
        return Ok(report);
    };
    let coord = |s: &str| -> std::result::Result<Option<f64>, ()> {
        opt(s).map(|v| v.parse::<f64>().map_err(|_| ())).transpose()
    };
    for row in rdr.records() {
        let parsed = row.ok().filter(|r| r.len() == 5).and_then(|r| {
            Some((
                IxpId::new(&r[0]),
                Location {
                    country: r[1].to_string(),
                    city: r[2].to_string(),
                    lat: coord(&r[3]).ok()?,
                    lon: coord(&r[4]).ok()?,
                },
            ))
        });
        match parsed {
            None => report.malformed_rows += 1,
            Some((id, loc)) => match graph.set_location(&id, loc) {
                Ok(()) => report.applied += 1,
                Err(_) => report.unknown_ids += 1,
            },
        }
    }
    Ok(report)
}
