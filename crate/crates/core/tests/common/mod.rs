//! Graph generators and brute-force oracles shared by integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use ixpgraph::metrics::Distribution;
use ixpgraph::model::{AsNode, IxpNode, MembershipEdge, Source};
use ixpgraph::placement::CoverageInstance;
use ixpgraph::{Asn, BipartiteGraph, IxpId};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn asn(n: u32) -> Asn {
    Asn::new(n).expect("positive ASN")
}

pub fn ixp_name(i: usize) -> String {
    format!("IX{i:03}")
}

/// Graph containing exactly the endpoints of `pairs` (IXP index, ASN).
pub fn graph_from_pairs(pairs: &[(usize, u32)]) -> BipartiteGraph {
    let mut g = BipartiteGraph::new();
    for &(i, a) in pairs {
        let id = IxpId::new(ixp_name(i));
        if g.ixp(&id).is_none() {
            g.add_ixp(IxpNode::new(id.clone(), ixp_name(i))).unwrap();
        }
        if g.as_node(asn(a)).is_none() {
            g.add_as(AsNode::new(asn(a))).unwrap();
        }
        g.add_membership(MembershipEdge::new(id, asn(a), Source::Other))
            .unwrap();
    }
    g
}

/// Random bipartite graph with up to `max_ixps` IXPs and `max_ases` ASes.
/// Every AS joins between one and four distinct IXPs chosen uniformly.
pub fn random_graph<R: Rng>(rng: &mut R, max_ixps: usize, max_ases: usize) -> BipartiteGraph {
    let n_ixps = rng.gen_range(1..=max_ixps);
    let n_ases = rng.gen_range(1..=max_ases);
    let ixps: Vec<usize> = (0..n_ixps).collect();
    let mut pairs = Vec::new();
    for a in 1..=n_ases as u32 {
        let d = rng.gen_range(1..=4.min(n_ixps));
        for &i in ixps.choose_multiple(rng, d) {
            pairs.push((i, a));
        }
    }
    graph_from_pairs(&pairs)
}

/// Synthetic graph at the scale of a full IXP membership snapshot: about
/// 500 IXPs, 4,700 ASes and 15,000 memberships, with 43% of ASes at a
/// single IXP and IXP popularity following a power law.
pub fn snapshot_scale_graph<R: Rng>(rng: &mut R) -> BipartiteGraph {
    const IXPS: usize = 500;
    const ASES: u32 = 4_700;
    let popularity: Vec<f64> = (0..IXPS)
        .map(|i| 1.0 / ((i + 1) as f64).powf(0.9))
        .collect();
    let pick = WeightedIndex::new(&popularity).unwrap();
    let mut pairs = Vec::new();
    for a in 1..=ASES {
        let degree = if rng.gen_bool(0.43) {
            1
        } else {
            // Geometric tail with mean ~4.8, matching ~15k total memberships.
            let mut d = 2;
            while d < IXPS && rng.gen_bool(0.74) {
                d += 1;
            }
            d
        };
        let mut chosen = BTreeSet::new();
        while chosen.len() < degree {
            chosen.insert(pick.sample(rng));
        }
        pairs.extend(chosen.into_iter().map(|i| (i, a)));
    }
    graph_from_pairs(&pairs)
}

/// Number of ASes that are members of both IXPs, by scanning every edge.
pub fn brute_common_members(graph: &BipartiteGraph, x: &IxpId, y: &IxpId) -> usize {
    let mut at_x = BTreeSet::new();
    let mut at_y = BTreeSet::new();
    for e in graph.edges() {
        if &e.ixp == x {
            at_x.insert(e.asn);
        }
        if &e.ixp == y {
            at_y.insert(e.asn);
        }
    }
    at_x.intersection(&at_y).count()
}

/// Number of IXPs shared by two ASes, by scanning every edge.
pub fn brute_common_ixps(graph: &BipartiteGraph, a: Asn, b: Asn) -> usize {
    let ixps_of = |n: Asn| -> BTreeSet<IxpId> {
        graph
            .edges()
            .filter(|e| e.asn == n)
            .map(|e| e.ixp.clone())
            .collect()
    };
    ixps_of(a).intersection(&ixps_of(b)).count()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Vertex {
    Ixp(IxpId),
    As(Asn),
}

/// Hop distance between two ASes by a fresh BFS over a hash-map adjacency
/// rebuilt from the edge list. `None` when unreachable.
pub fn naive_as_distance(graph: &BipartiteGraph, from: Asn, to: Asn) -> Option<usize> {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for e in graph.edges() {
        let (x, a) = (Vertex::Ixp(e.ixp.clone()), Vertex::As(e.asn));
        adj.entry(x.clone()).or_default().push(a.clone());
        adj.entry(a).or_default().push(x);
    }
    let target = Vertex::As(to);
    let mut seen: HashMap<Vertex, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(Vertex::As(from), 0);
    queue.push_back(Vertex::As(from));
    while let Some(v) = queue.pop_front() {
        let d = seen[&v];
        if v == target {
            return Some(d);
        }
        for w in adj.get(&v).into_iter().flatten() {
            if !seen.contains_key(w) {
                seen.insert(w.clone(), d + 1);
                queue.push_back(w.clone());
            }
        }
    }
    None
}

/// IXPs-crossed histogram over all unordered AS pairs using
/// [`naive_as_distance`].
pub fn naive_path_counts(graph: &BipartiteGraph) -> Distribution {
    let ases: Vec<Asn> = graph.ases().map(|a| a.asn).collect();
    let mut counts = BTreeMap::new();
    for (i, &a) in ases.iter().enumerate() {
        for &b in &ases[i + 1..] {
            let d = naive_as_distance(graph, a, b).expect("connected graph");
            assert_eq!(d % 2, 0, "odd AS-AS distance {a}-{b}");
            *counts.entry((d / 2) as u64).or_insert(0) += 1;
        }
    }
    Distribution::from_counts(counts)
}

/// Sum over ASes of C(deg, 2).
pub fn as_degree_pair_sum(graph: &BipartiteGraph) -> usize {
    graph
        .ases()
        .map(|a| {
            let d = graph.memberships(a.asn).unwrap().len();
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

/// The `n`-th harmonic number.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Random coverable instance with at most `max_candidates` candidates over
/// a universe of at most 15 ASes, with costs in [0.5, 3) and weights in
/// [0.5, 2).
pub fn random_instance<R: Rng>(rng: &mut R, max_candidates: usize) -> CoverageInstance {
    let n_universe = rng.gen_range(1..=15u32);
    let n_cand = rng.gen_range(1..=max_candidates);
    let universe: BTreeSet<Asn> = (1..=n_universe).map(asn).collect();
    let mut sets: Vec<BTreeSet<Asn>> = (0..n_cand)
        .map(|_| {
            universe
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.3))
                .collect()
        })
        .collect();
    for &a in &universe {
        if !sets.iter().any(|s| s.contains(&a)) {
            let k = rng.gen_range(0..n_cand);
            sets[k].insert(a);
        }
    }
    let candidates: BTreeMap<IxpId, BTreeSet<Asn>> = sets
        .into_iter()
        .enumerate()
        .map(|(i, s)| (IxpId::new(ixp_name(i)), s))
        .collect();
    let cost = candidates
        .keys()
        .map(|k| (k.clone(), rng.gen_range(0.5..3.0)))
        .collect();
    let weight = universe
        .iter()
        .map(|&a| (a, rng.gen_range(0.5..2.0)))
        .collect();
    CoverageInstance::new(universe, candidates, cost, weight).unwrap()
}

/// Copy of `inst` with every element weight set to 1.
pub fn unit_weights(inst: &CoverageInstance) -> CoverageInstance {
    let cost = inst
        .candidates()
        .keys()
        .map(|k| (k.clone(), inst.cost(k)))
        .collect();
    let weight = inst.universe().iter().map(|&a| (a, 1.0)).collect();
    CoverageInstance::new(
        inst.universe().clone(),
        inst.candidates().clone(),
        cost,
        weight,
    )
    .unwrap()
}

/// Approximation bound of cost-per-weight greedy set cover with element
/// weights: 1 + ln(total weight / smallest weight).
pub fn weighted_cover_bound(inst: &CoverageInstance) -> f64 {
    let weights: Vec<f64> = inst.universe().iter().map(|&a| inst.weight(a)).collect();
    let total: f64 = weights.iter().sum();
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    1.0 + (total / min).ln()
}
