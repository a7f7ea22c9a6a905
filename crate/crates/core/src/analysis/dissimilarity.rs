use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::{Algorithm, ApprovalElection, ResourceId};
use crate::error::{Error, Result};
use crate::owa::Exponent;
use crate::search::{Gamma, LocalElection};
use crate::solvers::AnnealingConfig;

/// `None` when `x` has no supporters; such a movie relates to nothing.
fn local_of(global: &ApprovalElection, x: ResourceId, gamma: Gamma) -> Result<Option<LocalElection>> {
    match LocalElection::build(global, &[x], gamma) {
        Ok(local) => Ok(Some(local)),
        Err(Error::NoSupporters) => Ok(None),
        Err(e) => Err(e),
    }
}

/// 1-based TF-IDF rank of every local resource of one query resource.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalRanks {
    /// Sorted by resource id.
    ranks: Vec<(ResourceId, u32)>,
}

impl LocalRanks {
    /// `None` when `x` has no supporters.
    pub fn compute(global: &ApprovalElection, x: ResourceId, gamma: Gamma) -> Result<Option<Self>> {
        let Some(local) = local_of(global, x, gamma)? else {
            return Ok(None);
        };
        let mut ranks: Vec<(ResourceId, u32)> = local
            .ranking()
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, i as u32 + 1))
            .collect();
        ranks.sort_unstable();
        Ok(Some(Self { ranks }))
    }

    pub fn rank(&self, y: ResourceId) -> Option<u32> {
        let i = self.ranks.binary_search_by_key(&y, |&(id, _)| id).ok()?;
        Some(self.ranks[i].1)
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

fn check_distinct(x: ResourceId, y: ResourceId) -> Result<()> {
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "rank and dissimilarity need two distinct resources, got {x} twice"
        )));
    }
    Ok(())
}

/// Position of `y` in `x`'s local election sorted by TF-IDF, highest first,
/// ties by ascending id. `None` when `y` is not a local resource of `x`.
pub fn rank_in_local(
    global: &ApprovalElection,
    x: ResourceId,
    y: ResourceId,
    gamma: Gamma,
) -> Result<Option<usize>> {
    check_distinct(x, y)?;
    let Some(local) = local_of(global, x, gamma)? else {
        return Ok(None);
    };
    let Some(ty) = local.tfidf_of(y) else {
        return Ok(None);
    };
    let ahead = local
        .resources()
        .iter()
        .zip(&local.tfidf)
        .filter(|&(&r, &t)| t > ty || (t == ty && r < y))
        .count();
    Ok(Some(ahead + 1))
}

/// Mean of the two mutual ranks; `None` if either is missing.
pub fn dissimilarity(
    global: &ApprovalElection,
    x: ResourceId,
    y: ResourceId,
    gamma: Gamma,
) -> Result<Option<f64>> {
    let forward = rank_in_local(global, x, y, gamma)?;
    let backward = rank_in_local(global, y, x, gamma)?;
    Ok(forward.zip(backward).map(|(a, b)| (a + b) as f64 / 2.0))
}

/// Pairwise dissimilarities over a node set.
#[derive(Clone, Debug, PartialEq)]
pub struct DissimilarityGraph {
    nodes: Vec<ResourceId>,
    diss: Vec<Option<f64>>,
}

impl DissimilarityGraph {
    /// Builds one local election per node, in parallel.
    pub fn build(global: &ApprovalElection, nodes: &[ResourceId], gamma: Gamma) -> Result<Self> {
        let nodes = Self::check_nodes(global, nodes)?;
        let rows: Vec<Option<LocalRanks>> = nodes
            .par_iter()
            .map(|&x| LocalRanks::compute(global, x, gamma))
            .collect::<Result<_>>()?;
        Ok(Self::from_ranks(nodes, |i| rows[i].as_ref()))
    }

    /// Sorted, deduplicated `nodes`, all of which must belong to `global`.
    pub fn check_nodes(global: &ApprovalElection, nodes: &[ResourceId]) -> Result<Vec<ResourceId>> {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        match nodes.iter().find(|&&r| !global.contains(r)) {
            Some(&missing) => Err(Error::UnknownResource(missing)),
            None => Ok(nodes),
        }
    }

    /// `ranks(i)` is the rank table of `nodes[i]`; `None` marks a node
    /// without supporters, dissimilar to everything.
    pub fn from_ranks<'a>(nodes: Vec<ResourceId>, ranks: impl Fn(usize) -> Option<&'a LocalRanks>) -> Self {
        for (i, &x) in nodes.iter().enumerate() {
            if ranks(i).is_none() {
                log::warn!("resource {x} has no supporters; it is dissimilar to everything");
            }
        }
        let ids = nodes.clone();
        Self::from_fn(nodes, |i, j| {
            let forward = ranks(i)?.rank(ids[j])?;
            let backward = ranks(j)?.rank(ids[i])?;
            Some(f64::from(forward + backward) / 2.0)
        })
    }

    /// `f(i, j)` is queried for `i < j` only.
    pub fn from_fn(nodes: Vec<ResourceId>, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let n = nodes.len();
        let mut diss = vec![None; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                diss[i * n + j] = d;
                diss[j * n + i] = d;
            }
        }
        Self { nodes, diss }
    }

    pub fn nodes(&self) -> &[ResourceId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Dissimilarity between nodes `i` and `j`; `None` on the diagonal.
    pub fn diss(&self, i: usize, j: usize) -> Option<f64> {
        self.diss[i * self.nodes.len() + j]
    }

    pub fn diss_between(&self, x: ResourceId, y: ResourceId) -> Option<f64> {
        let i = self.nodes.binary_search(&x).ok()?;
        let j = self.nodes.binary_search(&y).ok()?;
        self.diss(i, j)
    }

    /// Attraction `diss^-2`; zero for missing pairs.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.diss(i, j).map_or(0.0, |d| d.powi(-2))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCommittee {
    pub query: ResourceId,
    pub p: Exponent,
    pub members: Vec<ResourceId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extension {
    /// `A ∪ B ∪ C`, ascending.
    pub members: Vec<ResourceId>,
    /// Union of the p-HUV committees of the members of `A`.
    pub b: Vec<ResourceId>,
    /// Union of the size-2 AV committees of the members of `B`.
    pub c: Vec<ResourceId>,
    pub committees: Vec<ExtensionCommittee>,
    /// Resources whose local election was empty.
    pub skipped: Vec<ResourceId>,
}

/// `ext(A)`: the members of `A`, the winners for each of them under every
/// `p`, and the two closest resources to each of those winners.
pub fn build_extension(
    global: &ApprovalElection,
    a: &[ResourceId],
    k: usize,
    p_values: &[Exponent],
    gamma: Gamma,
) -> Result<Extension> {
    let a: BTreeSet<ResourceId> = a.iter().copied().collect();
    if let Some(&missing) = a.iter().find(|&&r| !global.contains(r)) {
        return Err(Error::UnknownResource(missing));
    }
    let mut committees = Vec::new();
    let mut skipped = BTreeSet::new();

    let mut solve_for = |x: ResourceId, p: Exponent, size: usize| -> Result<Option<Vec<ResourceId>>> {
        let local = match local_of(global, x, gamma)? {
            Some(local) if !local.is_empty() => local,
            _ => {
                log::warn!("resource {x} has an empty local election; skipped");
                skipped.insert(x);
                return Ok(None);
            }
        };
        let size = size.min(local.resources().len());
        let c = local.solve(p, size, Algorithm::Greedy, AnnealingConfig::default())?;
        Ok(Some(c.members))
    };

    let mut b = BTreeSet::new();
    for &x in &a {
        for &p in p_values {
            if let Some(members) = solve_for(x, p, k)? {
                b.extend(members.iter().copied());
                committees.push(ExtensionCommittee { query: x, p, members });
            }
        }
    }
    let mut c = BTreeSet::new();
    for &y in &b {
        if let Some(members) = solve_for(y, Exponent::ZERO, 2)? {
            c.extend(members.iter().copied());
            committees.push(ExtensionCommittee {
                query: y,
                p: Exponent::ZERO,
                members,
            });
        }
    }
    let members = a.iter().chain(&b).chain(&c).copied().collect::<BTreeSet<_>>();
    Ok(Extension {
        members: members.into_iter().collect(),
        b: b.into_iter().collect(),
        c: c.into_iter().collect(),
        committees,
        skipped: skipped.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(id: u32) -> ResourceId {
        ResourceId(id)
    }

    /// Query 0; local resources 1, 2, 3 approved by 3, 2, 1 local agents.
    fn crafted() -> ApprovalElection {
        ApprovalElection::new(
            (0..5).map(ResourceId),
            vec![
                vec![r(0), r(1), r(2), r(3)],
                vec![r(0), r(1), r(2)],
                vec![r(0), r(1)],
                vec![r(4)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn ranks_follow_tfidf() {
        let g = crafted();
        let gamma = Gamma::default();
        let local = LocalElection::build(&g, &[r(0)], gamma).unwrap();
        let mut oracle: Vec<(f64, u32)> = [1, 2, 3]
            .iter()
            .map(|&id| (local.approval.tfidf_score(r(id), gamma).unwrap(), id))
            .collect();
        oracle.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (rank, &(_, id)) in oracle.iter().enumerate() {
            assert_eq!(rank_in_local(&g, r(0), r(id), gamma).unwrap(), Some(rank + 1));
        }
        assert_eq!(rank_in_local(&g, r(0), r(4), gamma).unwrap(), None);
    }

    #[test]
    fn rank_errors() {
        let g = crafted();
        assert!(rank_in_local(&g, r(1), r(1), Gamma::default()).is_err());
        assert!(matches!(
            rank_in_local(&g, r(9), r(1), Gamma::default()),
            Err(Error::UnknownResource(_))
        ));
    }

    #[test]
    fn graph_matches_pairwise_definition() {
        let g = crafted();
        let gamma = Gamma::default();
        let nodes = [r(3), r(0), r(1), r(4)];
        let graph = DissimilarityGraph::build(&g, &nodes, gamma).unwrap();
        assert_eq!(graph.nodes(), &[r(0), r(1), r(3), r(4)]);
        for (i, &x) in graph.nodes().iter().enumerate() {
            for (j, &y) in graph.nodes().iter().enumerate() {
                if i != j {
                    assert_eq!(graph.diss(i, j), dissimilarity(&g, x, y, gamma).unwrap());
                    assert_eq!(graph.diss(i, j), graph.diss(j, i));
                }
            }
        }
        assert_eq!(graph.diss_between(r(0), r(4)), None);
        assert_eq!(graph.weight(0, 3), 0.0);
    }

    #[test]
    fn local_ranks_agree_with_rank_in_local() {
        let g = crafted();
        let gamma = Gamma::default();
        let ranks = LocalRanks::compute(&g, r(0), gamma).unwrap().unwrap();
        assert_eq!(ranks.len(), 3);
        for y in 1..5 {
            let expected = rank_in_local(&g, r(0), r(y), gamma).unwrap().map(|v| v as u32);
            assert_eq!(ranks.rank(r(y)), expected);
        }
        assert_eq!(LocalRanks::compute(&g, r(4), gamma).unwrap().map(|t| t.is_empty()), Some(true));
    }

    #[test]
    fn weight_is_inverse_square() {
        let graph = DissimilarityGraph::from_fn(vec![r(0), r(1)], |_, _| Some(2.0));
        assert_eq!(graph.weight(0, 1), 0.25);
    }

    #[test]
    fn extension_of_empty_set_is_empty() {
        let ext = build_extension(&crafted(), &[], 10, &[Exponent::ZERO], Gamma::default()).unwrap();
        assert!(ext.members.is_empty());
    }

    #[test]
    fn extension_contains_query_and_committees() {
        let g = crafted();
        let ext = build_extension(&g, &[r(0)], 2, &[Exponent::ZERO, Exponent::Finite(1)], Gamma::default()).unwrap();
        assert!(ext.members.contains(&r(0)));
        for c in &ext.committees {
            assert!(c.members.iter().all(|m| ext.members.contains(m)));
        }
        assert!(ext.skipped.is_empty());
        // resource 4 has supporters but its local election is empty
        let ext = build_extension(&g, &[r(4)], 2, &[Exponent::ZERO], Gamma::default()).unwrap();
        assert_eq!(ext.members, vec![r(4)]);
        assert_eq!(ext.skipped, vec![r(4)]);
    }
}
