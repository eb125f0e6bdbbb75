//! Topological metrics over the bipartite graph and its projections.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AdjacencyIndex, AsType, Asn, BipartiteGraph, IxpId, NodeClass, NodeId};
use crate::projection::Multigraph;

/// Seed used when path statistics are sampled and no seed is given.
pub const DEFAULT_SAMPLE_SEED: u64 = 42;

/// Histogram over non-negative integer values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Distribution {
    /// `(value, count)` with strictly increasing values and positive counts.
    values: Vec<(u64, u64)>,
    total: u64,
}

/// Row label of a bucketed distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bucket {
    Exact(u64),
    AtLeast(u64),
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Exact(v) => write!(f, "{v}"),
            Bucket::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Distribution {
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        let values: Vec<(u64, u64)> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = values.iter().map(|&(_, c)| c).sum();
        Distribution { values, total }
    }

    pub fn from_samples(samples: impl IntoIterator<Item = u64>) -> Self {
        let mut counts = BTreeMap::new();
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
        }
        Self::from_counts(counts)
    }

    pub fn values(&self) -> &[(u64, u64)] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, value: u64) -> u64 {
        self.values
            .binary_search_by_key(&value, |&(v, _)| v)
            .map_or(0, |i| self.values[i].1)
    }

    pub fn fraction(&self, value: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(value) as f64 / self.total as f64
        }
    }

    /// `(value, count, cumulative fraction)` rows.
    pub fn cdf(&self) -> Vec<(u64, u64, f64)> {
        let mut running = 0;
        self.values
            .iter()
            .map(|&(v, c)| {
                running += c;
                (v, c, running as f64 / self.total as f64)
            })
            .collect()
    }

    /// Folds every value `>= cap` into a single trailing bucket.
    pub fn bucketed(&self, cap: u64) -> Vec<(Bucket, u64)> {
        let mut rows: Vec<(Bucket, u64)> = self
            .values
            .iter()
            .filter(|&&(v, _)| v < cap)
            .map(|&(v, c)| (Bucket::Exact(v), c))
            .collect();
        let tail: u64 = self
            .values
            .iter()
            .filter(|&&(v, _)| v >= cap)
            .map(|&(_, c)| c)
            .sum();
        if tail > 0 {
            rows.push((Bucket::AtLeast(cap), tail));
        }
        rows
    }
}

/// Degree histogram over one vertex class.
pub fn degree_distribution(graph: &BipartiteGraph, class: NodeClass) -> Result<Distribution> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let degrees: Vec<u64> = match class {
        NodeClass::Ixp => graph
            .ixps()
            .map(|x| graph.members(&x.id).map(|m| m.len() as u64))
            .collect::<Result<_>>()?,
        NodeClass::As => graph
            .ases()
            .map(|a| graph.memberships(a.asn).map(|m| m.len() as u64))
            .collect::<Result<_>>()?,
    };
    Ok(Distribution::from_samples(degrees))
}

/// Shares of content, enterprise and ISP networks in a set of ASes.
/// Unknown-typed ASes count in the denominator only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TypeFractions {
    pub content: f64,
    pub enterprise: f64,
    pub isp: f64,
}

impl TypeFractions {
    fn of(types: impl IntoIterator<Item = AsType>) -> Self {
        let (mut c, mut e, mut i, mut n) = (0usize, 0usize, 0usize, 0usize);
        for t in types {
            n += 1;
            match t {
                AsType::Content => c += 1,
                AsType::Enterprise => e += 1,
                AsType::Isp => i += 1,
                AsType::Unknown => {}
            }
        }
        if n == 0 {
            return TypeFractions::default();
        }
        let n = n as f64;
        TypeFractions {
            content: c as f64 / n,
            enterprise: e as f64 / n,
            isp: i as f64 / n,
        }
    }

    pub fn get(&self, t: AsType) -> f64 {
        match t {
            AsType::Content => self.content,
            AsType::Enterprise => self.enterprise,
            AsType::Isp => self.isp,
            AsType::Unknown => 1.0 - self.content - self.enterprise - self.isp,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemberTypeReport {
    pub per_ixp: BTreeMap<IxpId, TypeFractions>,
}

impl MemberTypeReport {
    /// Empirical CDF over IXPs of the member share of `t`, as
    /// `(fraction, share of IXPs with at most that fraction)`.
    pub fn cdf(&self, t: AsType) -> Vec<(f64, f64)> {
        let mut xs: Vec<f64> = self.per_ixp.values().map(|f| f.get(t)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            let share = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == *x => last.1 = share,
                _ => out.push((*x, share)),
            }
        }
        out
    }
}

/// Per-IXP share of members of each AS type.
pub fn member_type_fractions(graph: &BipartiteGraph) -> Result<MemberTypeReport> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let per_ixp = graph
        .ixps()
        .map(|x| {
            let members = graph.members(&x.id)?;
            let fr = TypeFractions::of(members.iter().map(|&a| as_type_of(graph, a)));
            Ok((x.id.clone(), fr))
        })
        .collect::<Result<_>>()?;
    Ok(MemberTypeReport { per_ixp })
}

fn as_type_of(graph: &BipartiteGraph, asn: Asn) -> AsType {
    graph.as_node(asn).map_or(AsType::Unknown, |n| n.as_type)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeShareRow {
    pub label: String,
    pub min_degree_exclusive: u64,
    pub as_count: usize,
    pub fractions: TypeFractions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeShareTable {
    pub rows: Vec<TypeShareRow>,
}

/// AS-type shares among ASes with degree above each threshold. A threshold
/// of 0 selects every AS.
pub fn type_share_by_degree(graph: &BipartiteGraph, thresholds: &[u64]) -> Result<TypeShareTable> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let ases: Vec<(u64, AsType)> = graph
        .ases()
        .map(|a| Ok((graph.memberships(a.asn)?.len() as u64, a.as_type)))
        .collect::<Result<_>>()?;
    let rows = thresholds
        .iter()
        .map(|&t| {
            let subset: Vec<AsType> = ases
                .iter()
                .filter(|&&(d, _)| t == 0 || d > t)
                .map(|&(_, ty)| ty)
                .collect();
            TypeShareRow {
                label: if t == 0 {
                    "All ASes".to_string()
                } else {
                    format!("ASes with degree > {t}")
                },
                min_degree_exclusive: t,
                as_count: subset.len(),
                fractions: TypeFractions::of(subset),
            }
        })
        .collect();
    Ok(TypeShareTable { rows })
}

/// Source sampling for [`shortest_path_ixp_counts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathSample {
    pub sources: usize,
    pub seed: u64,
}

impl PathSample {
    pub fn new(sources: usize) -> Self {
        PathSample {
            sources,
            seed: DEFAULT_SAMPLE_SEED,
        }
    }
}

/// Hop distances in the bipartite graph from one node to every reachable
/// node.
pub fn bfs_hops(graph: &BipartiteGraph, from: &NodeId) -> Result<BTreeMap<NodeId, usize>> {
    if !graph.contains(from) {
        return Err(Error::UnknownNode(from.clone()));
    }
    let index = AdjacencyIndex::build(graph);
    let start = (0..index.len())
        .find(|&i| &index.node_id(i) == from)
        .expect("node present in index");
    let dist = bfs(&index.adj, start);
    Ok(dist
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d != UNREACHED)
        .map(|(i, &d)| (index.node_id(i), d as usize))
        .collect())
}

const UNREACHED: u32 = u32::MAX;

fn bfs(adj: &[Vec<u32>], start: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; adj.len()];
    let mut queue = VecDeque::with_capacity(adj.len());
    dist[start] = 0;
    queue.push_back(start as u32);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &w in &adj[v as usize] {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Distribution of the number of IXPs crossed by AS-to-AS shortest paths.
///
/// Every unordered AS pair is counted once. With a sample, only pairs with
/// at least one sampled endpoint are counted; sampling every AS yields the
/// exact result.
pub fn shortest_path_ixp_counts(
    graph: &BipartiteGraph,
    sample: Option<PathSample>,
) -> Result<Distribution> {
    let index = AdjacencyIndex::build(graph);
    let base = index.as_offset();
    let n_as = index.ases.len();

    let mut in_sample = vec![true; n_as];
    let sources: Vec<usize> = match sample {
        Some(s) if s.sources < n_as => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let mut picked = index::sample(&mut rng, n_as, s.sources).into_vec();
            picked.sort_unstable();
            in_sample = vec![false; n_as];
            for &p in &picked {
                in_sample[p] = true;
            }
            picked
        }
        _ => (0..n_as).collect(),
    };

    let tallies = sources
        .par_iter()
        .map(|&s| -> Result<Vec<u64>> {
            let dist = bfs(&index.adj, base + s);
            let mut tally = Vec::new();
            for t in 0..n_as {
                if t == s || (in_sample[t] && t < s) {
                    continue;
                }
                let d = dist[base + t];
                if d == UNREACHED {
                    let (a, b) = (index.ases[s], index.ases[t]);
                    return Err(Error::Disconnected(a.min(b), a.max(b)));
                }
                debug_assert!(d.is_multiple_of(2), "AS-AS distance must be even");
                let crossed = (d / 2) as usize;
                if tally.len() <= crossed {
                    tally.resize(crossed + 1, 0);
                }
                tally[crossed] += 1;
            }
            Ok(tally)
        })
        .try_reduce(Vec::new, |mut acc, t| {
            if acc.len() < t.len() {
                acc.resize(t.len(), 0);
            }
            for (i, c) in t.into_iter().enumerate() {
                acc[i] += c;
            }
            Ok(acc)
        })?;

    Ok(Distribution::from_counts(
        tallies
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as u64, c))
            .collect(),
    ))
}

/// Histogram of edge multiplicity over all unordered node pairs of the
/// projection's class, including pairs with multiplicity 0.
pub fn multiplicity_distribution(mg: &Multigraph) -> Distribution {
    let n = mg.node_count() as u64;
    let all_pairs = n * n.saturating_sub(1) / 2;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (_, _, vias) in mg.pairs() {
        *counts.entry(vias.len() as u64).or_insert(0) += 1;
    }
    counts.insert(0, all_pairs - mg.pair_count() as u64);
    Distribution::from_counts(counts)
}

fn colocated(graph: &BipartiteGraph, a: Asn, b: Asn) -> Result<bool> {
    let ia = graph.memberships(a)?;
    let ib = graph.memberships(b)?;
    Ok(ia.intersection(ib).next().is_some())
}

fn reach(graph: &BipartiteGraph, asn: Asn) -> Result<BTreeSet<Asn>> {
    let mut out = BTreeSet::new();
    for ixp in graph.memberships(asn)? {
        out.extend(graph.members(ixp)?.iter().copied());
    }
    Ok(out)
}

/// Number of ASes that `a` would newly reach by using `b` as a remote
/// peering tunnel: members of `b`'s IXPs that are not already members of
/// one of `a`'s IXPs, excluding `a` and `b`.
pub fn remote_peering_gain(graph: &BipartiteGraph, a: Asn, b: Asn) -> Result<usize> {
    if a == b {
        return Err(Error::InvalidInput(format!(
            "{a} cannot tunnel through itself"
        )));
    }
    if !colocated(graph, a, b)? {
        return Err(Error::NotColocated(a, b));
    }
    let own = reach(graph, a)?;
    let via = reach(graph, b)?;
    Ok(via.difference(&own).filter(|&&x| x != a && x != b).count())
}

/// Distribution of [`remote_peering_gain`] over every ordered pair of
/// co-located ASes.
pub fn remote_peering_gain_cdf(graph: &BipartiteGraph) -> Distribution {
    let ases: Vec<Asn> = graph.ases().map(|a| a.asn).collect();
    let pos: BTreeMap<Asn, usize> = ases.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let n = ases.len();
    let reach: Vec<FixedBitSet> = ases
        .iter()
        .map(|&a| {
            let mut set = FixedBitSet::with_capacity(n);
            for ixp in graph.memberships(a).into_iter().flatten() {
                for m in graph.members(ixp).into_iter().flatten() {
                    set.insert(pos[m]);
                }
            }
            set
        })
        .collect();

    // b is co-located with a iff b is in reach(a); both a and b are then in
    // reach(a), so the exclusion of {a, b} is implicit in the difference.
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local: BTreeMap<u64, u64> = BTreeMap::new();
            for j in reach[i].ones().filter(|&j| j != i) {
                let gain = reach[j].difference_count(&reach[i]) as u64;
                *local.entry(gain).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut acc, m| {
            for (k, v) in m {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        });
    Distribution::from_counts(counts)
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput("series lengths differ".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!("{} data points", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientData("constant variable".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation between AS degree and announced prefix count, over ASes
/// with prefix data.
pub fn degree_prefix_correlation(graph: &BipartiteGraph) -> Result<f64> {
    let mut degrees = Vec::new();
    let mut prefixes = Vec::new();
    for node in graph.ases() {
        if let Some(count) = node.prefix_count {
            degrees.push(graph.memberships(node.asn)?.len() as f64);
            prefixes.push(count as f64);
        }
    }
    pearson(&degrees, &prefixes)
}

/// Betweenness centrality on the simple graph underlying `mg`, normalized
/// by `(n-1)(n-2)/2`.
pub fn betweenness_centrality(mg: &Multigraph) -> Result<BTreeMap<NodeId, f64>> {
    if mg.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (nodes, adj) = mg.simple_adjacency();
    let n = nodes.len();
    let raw = (0..n)
        .into_par_iter()
        .map(|s| brandes_from(&adj, s))
        .reduce(
            || vec![0.0; n],
            |mut acc, d| {
                for (a, x) in acc.iter_mut().zip(d) {
                    *a += x;
                }
                acc
            },
        );
    // Each unordered pair is visited from both ends.
    let scale = if n > 2 {
        1.0 / ((n - 1) as f64 * (n - 2) as f64)
    } else {
        0.0
    };
    Ok(nodes
        .into_iter()
        .zip(raw)
        .map(|(v, b)| (v, b * scale))
        .collect())
}

fn brandes_from(adj: &[Vec<usize>], s: usize) -> Vec<f64> {
    let n = adj.len();
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// Local clustering coefficient on the simple graph underlying `mg`.
/// Nodes with fewer than two neighbors score 0.
pub fn clustering_coefficient(mg: &Multigraph) -> Result<BTreeMap<NodeId, f64>> {
    if mg.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (nodes, adj) = mg.simple_adjacency();
    let scores: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|v| {
            let nb = &adj[v];
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &u) in nb.iter().enumerate() {
                for &w in &nb[i + 1..] {
                    if adj[u].binary_search(&w).is_ok() {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    Ok(nodes.into_iter().zip(scores).collect())
}
