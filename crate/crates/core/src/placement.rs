//! IXP selection problems as coverage optimizations.
//!
//! Choosing IXPs at which to deploy equipment so that a set of customer ASes
//! is reachable is a set cover problem when every customer must be covered
//! at minimum cost, and a budgeted maximum coverage problem when spending is
//! capped. An AS is covered by an IXP when it is a member of that IXP.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::remote_peering_gain;
use crate::model::{Asn, BipartiteGraph, IxpId, NodeId};

/// Largest instance [`exhaustive_cover_oracle`] accepts.
pub const ORACLE_MAX_CANDIDATES: usize = 20;

// Slack for floating-point cost sums compared against a budget.
const BUDGET_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageInstance {
    universe: BTreeSet<Asn>,
    candidates: BTreeMap<IxpId, BTreeSet<Asn>>,
    cost: BTreeMap<IxpId, f64>,
    weight: BTreeMap<Asn, f64>,
}

impl CoverageInstance {
    /// Validates that every candidate covers only universe elements and has
    /// a positive cost, and that every element has a positive weight.
    pub fn new(
        universe: BTreeSet<Asn>,
        candidates: BTreeMap<IxpId, BTreeSet<Asn>>,
        cost: BTreeMap<IxpId, f64>,
        weight: BTreeMap<Asn, f64>,
    ) -> Result<Self> {
        for (id, covered) in &candidates {
            if let Some(outside) = covered.difference(&universe).next() {
                return Err(Error::InvalidInput(format!(
                    "{id} covers {outside} outside the universe"
                )));
            }
            match cost.get(id) {
                Some(c) if c.is_finite() && *c > 0.0 => {}
                Some(c) => {
                    return Err(Error::InvalidInput(format!(
                        "{id} has non-positive cost {c}"
                    )))
                }
                None => return Err(Error::InvalidInput(format!("{id} has no cost"))),
            }
        }
        for asn in &universe {
            match weight.get(asn) {
                Some(w) if w.is_finite() && *w > 0.0 => {}
                Some(w) => {
                    return Err(Error::InvalidInput(format!(
                        "{asn} has non-positive weight {w}"
                    )))
                }
                None => return Err(Error::InvalidInput(format!("{asn} has no weight"))),
            }
        }
        Ok(CoverageInstance {
            universe,
            candidates,
            cost,
            weight,
        })
    }

    pub fn universe(&self) -> &BTreeSet<Asn> {
        &self.universe
    }

    pub fn candidates(&self) -> &BTreeMap<IxpId, BTreeSet<Asn>> {
        &self.candidates
    }

    pub fn cost(&self, id: &IxpId) -> f64 {
        self.cost[id]
    }

    pub fn weight(&self, asn: Asn) -> f64 {
        self.weight[&asn]
    }

    /// Universe elements no candidate covers.
    pub fn uncoverable(&self) -> BTreeSet<Asn> {
        let covered: BTreeSet<Asn> = self.candidates.values().flatten().copied().collect();
        self.universe.difference(&covered).copied().collect()
    }

    fn solution(&self, chosen: Vec<IxpId>) -> PlacementSolution {
        let covered: BTreeSet<Asn> = chosen
            .iter()
            .flat_map(|id| self.candidates[id].iter().copied())
            .collect();
        PlacementSolution {
            total_cost: chosen.iter().map(|id| self.cost[id]).sum(),
            total_weight: covered.iter().map(|a| self.weight[a]).sum(),
            chosen,
            covered,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlacementSolution {
    /// IXPs in pick order.
    pub chosen: Vec<IxpId>,
    pub covered: BTreeSet<Asn>,
    pub total_cost: f64,
    pub total_weight: f64,
}

/// Coverage instance over `targets`. Candidates are the IXPs with at least
/// one target member; missing costs and weights default to 1.
pub fn build_instance(
    graph: &BipartiteGraph,
    targets: &BTreeSet<Asn>,
    costs: Option<&BTreeMap<IxpId, f64>>,
    weights: Option<&BTreeMap<Asn, f64>>,
) -> Result<CoverageInstance> {
    for &t in targets {
        if graph.as_node(t).is_none() {
            return Err(Error::UnknownTarget(t));
        }
    }
    let mut candidates: BTreeMap<IxpId, BTreeSet<Asn>> = BTreeMap::new();
    for &t in targets {
        for ixp in graph.memberships(t)? {
            candidates.entry(ixp.clone()).or_default().insert(t);
        }
    }
    let cost = candidates
        .keys()
        .map(|id| {
            (
                id.clone(),
                costs.and_then(|c| c.get(id)).copied().unwrap_or(1.0),
            )
        })
        .collect();
    let weight = targets
        .iter()
        .map(|&a| (a, weights.and_then(|w| w.get(&a)).copied().unwrap_or(1.0)))
        .collect();
    CoverageInstance::new(targets.clone(), candidates, cost, weight)
}

struct Pick<'a> {
    id: &'a IxpId,
    ratio: f64,
    gain: f64,
}

fn new_weight(instance: &CoverageInstance, covered: &BTreeSet<Asn>, id: &IxpId) -> f64 {
    instance.candidates[id]
        .iter()
        .filter(|a| !covered.contains(a))
        .map(|a| instance.weight[a])
        .sum()
}

/// Order in which a greedy step prefers picks: better ratio, then larger
/// newly covered weight, then smaller id.
fn prefer(a: &Pick, b: &Pick, ratio_lower_is_better: bool) -> Ordering {
    let ratio = if ratio_lower_is_better {
        a.ratio.total_cmp(&b.ratio)
    } else {
        b.ratio.total_cmp(&a.ratio)
    };
    ratio
        .then_with(|| b.gain.total_cmp(&a.gain))
        .then_with(|| a.id.cmp(b.id))
}

/// Cost-effectiveness greedy for weighted set cover.
pub fn greedy_set_cover(instance: &CoverageInstance) -> Result<PlacementSolution> {
    let residue = instance.uncoverable();
    if !residue.is_empty() {
        return Err(Error::Uncoverable { residue });
    }
    let mut covered = BTreeSet::new();
    let mut chosen = Vec::new();
    while covered.len() < instance.universe.len() {
        let best = instance
            .candidates
            .keys()
            .filter_map(|id| {
                let gain = new_weight(instance, &covered, id);
                (gain > 0.0).then(|| Pick {
                    id,
                    ratio: instance.cost[id] / gain,
                    gain,
                })
            })
            .min_by(|a, b| prefer(a, b, true))
            .expect("coverable universe always has a useful candidate");
        covered.extend(instance.candidates[best.id].iter().copied());
        chosen.push(best.id.clone());
    }
    Ok(instance.solution(chosen))
}

/// Budgeted maximum coverage: the better of weight-per-cost greedy under
/// the budget and the best single affordable candidate.
pub fn budgeted_max_coverage(
    instance: &CoverageInstance,
    budget: f64,
) -> Result<PlacementSolution> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let mut covered = BTreeSet::new();
    let mut chosen = Vec::new();
    let mut spent = 0.0;
    loop {
        let best = instance
            .candidates
            .keys()
            .filter(|id| spent + instance.cost[*id] <= budget + BUDGET_EPS)
            .filter_map(|id| {
                let gain = new_weight(instance, &covered, id);
                (gain > 0.0).then(|| Pick {
                    id,
                    ratio: gain / instance.cost[id],
                    gain,
                })
            })
            .min_by(|a, b| prefer(a, b, false));
        let Some(best) = best else { break };
        spent += instance.cost[best.id];
        covered.extend(instance.candidates[best.id].iter().copied());
        chosen.push(best.id.clone());
    }
    let greedy = instance.solution(chosen);

    let single = instance
        .candidates
        .keys()
        .filter(|id| instance.cost[*id] <= budget + BUDGET_EPS)
        .map(|id| Pick {
            id,
            ratio: new_weight(instance, &BTreeSet::new(), id),
            gain: new_weight(instance, &BTreeSet::new(), id),
        })
        .min_by(|a, b| prefer(a, b, false))
        .map(|p| instance.solution(vec![p.id.clone()]));

    Ok(match single {
        Some(s) if s.total_weight > greedy.total_weight => s,
        _ => greedy,
    })
}

/// Optimal solution by enumerating every subset of candidates. Without a
/// budget this is the minimum-cost full cover; with one, the maximum
/// covered weight within the budget. Ties keep the subset enumerated first.
pub fn exhaustive_cover_oracle(
    instance: &CoverageInstance,
    budget: Option<f64>,
) -> Result<PlacementSolution> {
    let ids: Vec<&IxpId> = instance.candidates.keys().collect();
    if ids.len() > ORACLE_MAX_CANDIDATES {
        return Err(Error::TooLarge {
            candidates: ids.len(),
            limit: ORACLE_MAX_CANDIDATES,
        });
    }
    let elems: Vec<Asn> = instance.universe.iter().copied().collect();
    let pos: BTreeMap<Asn, usize> = elems.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let sets: Vec<FixedBitSet> = ids
        .iter()
        .map(|id| {
            let mut s = FixedBitSet::with_capacity(elems.len());
            for a in &instance.candidates[*id] {
                s.insert(pos[a]);
            }
            s
        })
        .collect();
    let costs: Vec<f64> = ids.iter().map(|id| instance.cost[*id]).collect();
    let weights: Vec<f64> = elems.iter().map(|a| instance.weight[a]).collect();

    let mut best: Option<(u32, f64, f64)> = None; // (mask, cost, weight)
    let mut union = FixedBitSet::with_capacity(elems.len());
    for mask in 0u32..(1u32 << ids.len()) {
        let cost: f64 = (0..ids.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| costs[i])
            .sum();
        if let Some(b) = budget {
            if cost > b + BUDGET_EPS {
                continue;
            }
        }
        union.clear();
        for i in (0..ids.len()).filter(|i| mask >> i & 1 == 1) {
            union.union_with(&sets[i]);
        }
        let weight: f64 = union.ones().map(|i| weights[i]).sum();
        let better = match (budget, best) {
            (_, None) => budget.is_some() || union.count_ones(..) == elems.len(),
            (None, Some((_, c, _))) => union.count_ones(..) == elems.len() && cost < c,
            (Some(_), Some((_, _, w))) => weight > w,
        };
        if better {
            best = Some((mask, cost, weight));
        }
    }
    match best {
        Some((mask, _, _)) => {
            let chosen = (0..ids.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ids[i].clone())
                .collect();
            Ok(instance.solution(chosen))
        }
        None => Err(Error::Uncoverable {
            residue: instance.uncoverable(),
        }),
    }
}

/// Candidate tunnel ASes for `a`, by remote peering gain (descending), ties
/// by ascending ASN.
pub fn rank_tunnels(graph: &BipartiteGraph, a: Asn) -> Result<Vec<(Asn, usize)>> {
    let mut partners = BTreeSet::new();
    for ixp in graph.memberships(a)? {
        partners.extend(graph.members(ixp)?.iter().copied().filter(|&b| b != a));
    }
    let mut ranked = partners
        .into_iter()
        .map(|b| Ok((b, remote_peering_gain(graph, a, b)?)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    Ok(ranked)
}

/// A candidate site: a country, optionally narrowed to a city. Matching is
/// case-insensitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteLocation {
    pub country: String,
    pub city: Option<String>,
}

impl SiteLocation {
    fn matches(&self, loc: &crate::model::Location) -> bool {
        loc.country.eq_ignore_ascii_case(self.country.trim())
            && self
                .city
                .as_ref()
                .is_none_or(|c| loc.city.eq_ignore_ascii_case(c.trim()))
    }
}

/// Score of a new site: every AS with a membership at an IXP in the
/// location contributes `1 / (1 + degree)`.
pub fn site_selection_score(graph: &BipartiteGraph, site: &SiteLocation) -> Result<f64> {
    site_selection_score_with(graph, site, |degree| 1.0 / (1.0 + degree as f64))
}

/// [`site_selection_score`] with a custom per-AS score of its degree.
pub fn site_selection_score_with(
    graph: &BipartiteGraph,
    site: &SiteLocation,
    score: impl Fn(usize) -> f64,
) -> Result<f64> {
    if graph.ixps().all(|x| x.location.is_none()) {
        return Err(Error::NoLocationData);
    }
    let mut ases = BTreeSet::new();
    for ixp in graph.ixps() {
        if ixp.location.as_ref().is_some_and(|l| site.matches(l)) {
            ases.extend(graph.members(&ixp.id)?.iter().copied());
        }
    }
    ases.into_iter()
        .map(|a| Ok(score(graph.degree(&NodeId::As(a))?)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{asn, from_memberships, toy_graph};
    use crate::model::Location;

    fn ids(v: &[&str]) -> Vec<IxpId> {
        v.iter().map(IxpId::new).collect()
    }

    fn all_toy() -> BTreeSet<Asn> {
        (1..=4).map(asn).collect()
    }

    #[test]
    fn toy_instance() {
        let inst = build_instance(&toy_graph(), &all_toy(), None, None).unwrap();
        let c = inst.candidates();
        assert_eq!(c.len(), 3);
        assert_eq!(c[&IxpId::new("X1")], [1, 2, 3].map(asn).into());
        assert_eq!(c[&IxpId::new("X2")], [2, 3, 4].map(asn).into());
        assert_eq!(c[&IxpId::new("X3")], [1].map(asn).into());
        assert_eq!(inst.cost(&IxpId::new("X2")), 1.0);
        assert_eq!(inst.weight(asn(4)), 1.0);
    }

    #[test]
    fn empty_and_single_target_instances() {
        let inst = build_instance(&toy_graph(), &BTreeSet::new(), None, None).unwrap();
        assert!(inst.universe().is_empty() && inst.candidates().is_empty());
        let inst = build_instance(&toy_graph(), &[asn(4)].into(), None, None).unwrap();
        assert_eq!(inst.candidates().len(), 1);
        assert_eq!(inst.candidates()[&IxpId::new("X2")], [asn(4)].into());
    }

    #[test]
    fn unknown_target_rejected() {
        let err = build_instance(&toy_graph(), &[asn(9)].into(), None, None).unwrap_err();
        assert!(matches!(err, Error::UnknownTarget(a) if a == asn(9)));
    }

    #[test]
    fn toy_greedy_cover() {
        let inst = build_instance(&toy_graph(), &all_toy(), None, None).unwrap();
        let sol = greedy_set_cover(&inst).unwrap();
        assert_eq!(sol.chosen, ids(&["X1", "X2"]));
        assert_eq!(sol.total_cost, 2.0);
        assert_eq!(sol.covered, all_toy());
        assert_eq!(
            exhaustive_cover_oracle(&inst, None).unwrap().total_cost,
            2.0
        );
    }

    #[test]
    fn single_candidate_covers_everything() {
        let g = from_memberships(&[("X1", 1), ("X1", 2)]);
        let inst = build_instance(&g, &[asn(1), asn(2)].into(), None, None).unwrap();
        assert_eq!(greedy_set_cover(&inst).unwrap().chosen, ids(&["X1"]));
    }

    #[test]
    fn uncoverable_residue_is_listed() {
        let inst = CoverageInstance::new(
            [asn(1), asn(2)].into(),
            [(IxpId::new("X1"), [asn(1)].into())].into(),
            [(IxpId::new("X1"), 1.0)].into(),
            [(asn(1), 1.0), (asn(2), 1.0)].into(),
        )
        .unwrap();
        match greedy_set_cover(&inst) {
            Err(Error::Uncoverable { residue }) => assert_eq!(residue, [asn(2)].into()),
            other => panic!("expected Uncoverable, got {other:?}"),
        }
        assert!(matches!(
            exhaustive_cover_oracle(&inst, None),
            Err(Error::Uncoverable { .. })
        ));
    }

    #[test]
    fn cheaper_candidate_wins_on_ratio() {
        let mut costs = BTreeMap::new();
        costs.insert(IxpId::new("X1"), 10.0);
        let inst = build_instance(&toy_graph(), &all_toy(), Some(&costs), None).unwrap();
        let sol = greedy_set_cover(&inst).unwrap();
        // X2 costs 1 for 3 ASes; then AS1 via X3 at cost 1 beats X1 at 10.
        assert_eq!(sol.chosen, ids(&["X2", "X3"]));
        assert_eq!(sol.total_cost, 2.0);
    }

    #[test]
    fn toy_budget_one() {
        let inst = build_instance(&toy_graph(), &all_toy(), None, None).unwrap();
        let sol = budgeted_max_coverage(&inst, 1.0).unwrap();
        assert_eq!(sol.chosen, ids(&["X1"]));
        assert_eq!(sol.total_weight, 3.0);
        assert_eq!(
            exhaustive_cover_oracle(&inst, Some(1.0))
                .unwrap()
                .total_weight,
            3.0
        );
    }

    #[test]
    fn non_binding_budget_covers_union() {
        let inst = build_instance(&toy_graph(), &all_toy(), None, None).unwrap();
        let sol = budgeted_max_coverage(&inst, 100.0).unwrap();
        assert_eq!(sol.covered, all_toy());
    }

    #[test]
    fn tiny_budget_gives_empty_solution() {
        let inst = build_instance(&toy_graph(), &all_toy(), None, None).unwrap();
        let sol = budgeted_max_coverage(&inst, 0.5).unwrap();
        assert!(sol.chosen.is_empty());
        assert_eq!(sol.total_weight, 0.0);
        assert!(budgeted_max_coverage(&inst, 0.0).is_err());
    }

    #[test]
    fn single_set_branch_beats_greedy() {
        // Greedy takes the cheap high-ratio set and then cannot afford the big one.
        let inst = CoverageInstance::new(
            (1..=11).map(asn).collect(),
            [
                (IxpId::new("A"), [asn(1)].into()),
                (IxpId::new("B"), (2..=11).map(asn).collect()),
            ]
            .into(),
            [(IxpId::new("A"), 0.1), (IxpId::new("B"), 10.0)].into(),
            (1..=11).map(|i| (asn(i), 1.0)).collect(),
        )
        .unwrap();
        let sol = budgeted_max_coverage(&inst, 10.0).unwrap();
        assert_eq!(sol.chosen, ids(&["B"]));
        assert_eq!(sol.total_weight, 10.0);
    }

    #[test]
    fn oracle_edge_cases() {
        let inst = build_instance(&toy_graph(), &BTreeSet::new(), None, None).unwrap();
        let sol = exhaustive_cover_oracle(&inst, None).unwrap();
        assert_eq!(sol.total_cost, 0.0);
        assert!(sol.chosen.is_empty());

        let n = ORACLE_MAX_CANDIDATES + 1;
        let pairs: Vec<(String, u32)> =
            (0..n).map(|i| (format!("X{i:02}"), i as u32 + 1)).collect();
        let refs: Vec<(&str, u32)> = pairs.iter().map(|(x, a)| (x.as_str(), *a)).collect();
        let g = from_memberships(&refs);
        let targets = (1..=n as u32).map(asn).collect();
        let inst = build_instance(&g, &targets, None, None).unwrap();
        assert!(matches!(
            exhaustive_cover_oracle(&inst, None),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn invalid_instances_rejected() {
        let bad_cost = CoverageInstance::new(
            [asn(1)].into(),
            [(IxpId::new("X1"), [asn(1)].into())].into(),
            [(IxpId::new("X1"), 0.0)].into(),
            [(asn(1), 1.0)].into(),
        );
        assert!(bad_cost.is_err());
        let outside = CoverageInstance::new(
            [asn(1)].into(),
            [(IxpId::new("X1"), [asn(2)].into())].into(),
            [(IxpId::new("X1"), 1.0)].into(),
            [(asn(1), 1.0)].into(),
        );
        assert!(outside.is_err());
    }

    #[test]
    fn toy_tunnel_ranking() {
        let g = toy_graph();
        assert_eq!(
            rank_tunnels(&g, asn(1)).unwrap(),
            vec![(asn(2), 1), (asn(3), 1)]
        );
        assert_eq!(
            rank_tunnels(&g, asn(4)).unwrap(),
            vec![(asn(2), 1), (asn(3), 1)]
        );
        let lone = from_memberships(&[("X1", 1), ("X1", 2), ("X2", 3), ("X2", 2)]);
        let lonely = {
            let mut h = lone.clone();
            h.add_ixp(crate::model::IxpNode::new("X9", "X9")).unwrap();
            h.add_as(crate::model::AsNode::new(asn(9))).unwrap();
            h.add_membership(crate::model::MembershipEdge::new(
                "X9",
                asn(9),
                crate::model::Source::Pdb,
            ))
            .unwrap();
            h
        };
        assert!(rank_tunnels(&lonely, asn(9)).unwrap().is_empty());
        assert!(matches!(
            rank_tunnels(&g, asn(50)),
            Err(Error::UnknownNode(_))
        ));
    }

    fn located_toy() -> BipartiteGraph {
        let mut g = toy_graph();
        let loc = |country: &str, city: &str| Location {
            country: country.into(),
            city: city.into(),
            lat: None,
            lon: None,
        };
        g.set_location(&IxpId::new("X1"), loc("DE", "Frankfurt"))
            .unwrap();
        g.set_location(&IxpId::new("X2"), loc("NL", "Amsterdam"))
            .unwrap();
        g.set_location(&IxpId::new("X3"), loc("GR", "Athens"))
            .unwrap();
        g
    }

    #[test]
    fn toy_site_scores() {
        let g = located_toy();
        let athens = SiteLocation {
            country: "gr".into(),
            city: Some("athens".into()),
        };
        assert!((site_selection_score(&g, &athens).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let nowhere = SiteLocation {
            country: "FR".into(),
            city: None,
        };
        assert_eq!(site_selection_score(&g, &nowhere).unwrap(), 0.0);
        assert!(matches!(
            site_selection_score(&toy_graph(), &athens),
            Err(Error::NoLocationData)
        ));
    }

    #[test]
    fn two_single_homed_ases_score_one() {
        let mut g = from_memberships(&[("X1", 1), ("X1", 2)]);
        g.set_location(
            &IxpId::new("X1"),
            Location {
                country: "GR".into(),
                city: "Heraklion".into(),
                lat: Some(35.34),
                lon: Some(25.13),
            },
        )
        .unwrap();
        let site = SiteLocation {
            country: "GR".into(),
            city: None,
        };
        assert!((site_selection_score(&g, &site).unwrap() - 1.0).abs() < 1e-12);
    }
}
