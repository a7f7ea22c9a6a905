//! Approval and utility elections.
//!
//! Both election kinds keep their resources sorted by id and refer to them
//! internally by position, with a per-agent ballot index and a per-resource
//! column index. The two indexes always describe the same incidence.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::canonical_sum;

/// Opaque key of a resource (a movie, in the MovieLens setting).
#[derive(
    Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ResourceId(pub u32);

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ResourceId {
    fn from(id: u32) -> Self {
        ResourceId(id)
    }
}

fn sorted_unique(resources: impl IntoIterator<Item = ResourceId>) -> Vec<ResourceId> {
    let mut resources: Vec<ResourceId> = resources.into_iter().collect();
    resources.sort_unstable();
    resources.dedup();
    resources
}

fn locate(resources: &[ResourceId], r: ResourceId) -> Option<usize> {
    resources.binary_search(&r).ok()
}

/// An election where every utility is either 0 or 1.
///
/// Agents are the contiguous indices `0..n_agents()`. Agents with empty
/// ballots are allowed and count towards `n_agents()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApprovalElection {
    resources: Vec<ResourceId>,
    ballots: Vec<Vec<u32>>,
    approvers: Vec<Vec<u32>>,
}

impl ApprovalElection {
    /// Builds an election from per-agent approval sets. Repeated approvals
    /// within a ballot collapse; every approved id must be in `resources`.
    pub fn new(
        resources: impl IntoIterator<Item = ResourceId>,
        ballots: Vec<Vec<ResourceId>>,
    ) -> Result<Self> {
        let resources = sorted_unique(resources);
        let mut indexed = Vec::with_capacity(ballots.len());
        for ballot in ballots {
            let mut row = Vec::with_capacity(ballot.len());
            for r in ballot {
                let pos = locate(&resources, r).ok_or(Error::UnknownResource(r))?;
                row.push(pos as u32);
            }
            indexed.push(row);
        }
        Ok(Self::from_indexed(resources, indexed))
    }

    /// `resources` must be sorted and unique; ballots hold positions into it.
    pub(crate) fn from_indexed(resources: Vec<ResourceId>, mut ballots: Vec<Vec<u32>>) -> Self {
        debug_assert!(resources.windows(2).all(|w| w[0] < w[1]));
        let mut approvers = vec![Vec::new(); resources.len()];
        for (agent, ballot) in ballots.iter_mut().enumerate() {
            ballot.sort_unstable();
            ballot.dedup();
            for &pos in ballot.iter() {
                approvers[pos as usize].push(agent as u32);
            }
        }
        Self {
            resources,
            ballots,
            approvers,
        }
    }

    /// Builds an election from per-resource approver lists over `n_agents` agents.
    pub(crate) fn from_columns(
        resources: Vec<ResourceId>,
        n_agents: usize,
        mut approvers: Vec<Vec<u32>>,
    ) -> Self {
        debug_assert_eq!(resources.len(), approvers.len());
        let mut ballots = vec![Vec::new(); n_agents];
        for (pos, column) in approvers.iter_mut().enumerate() {
            column.sort_unstable();
            column.dedup();
            for &agent in column.iter() {
                ballots[agent as usize].push(pos as u32);
            }
        }
        Self {
            resources,
            ballots,
            approvers,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.ballots.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    /// Resources in ascending id order.
    pub fn resources(&self) -> &[ResourceId] {
        &self.resources
    }

    pub fn contains(&self, r: ResourceId) -> bool {
        self.position(r).is_some()
    }

    pub fn position(&self, r: ResourceId) -> Option<usize> {
        locate(&self.resources, r)
    }

    /// Resources approved by `agent`, ascending.
    pub fn ballot(&self, agent: usize) -> impl Iterator<Item = ResourceId> + '_ {
        self.ballots[agent]
            .iter()
            .map(move |&pos| self.resources[pos as usize])
    }

    pub(crate) fn ballot_positions(&self, agent: usize) -> &[u32] {
        &self.ballots[agent]
    }

    /// Agents approving `r`, ascending. Empty for unknown resources.
    pub fn approvers(&self, r: ResourceId) -> &[u32] {
        match self.position(r) {
            Some(pos) => &self.approvers[pos],
            None => &[],
        }
    }

    pub(crate) fn approvers_at(&self, pos: usize) -> &[u32] {
        &self.approvers[pos]
    }

    /// `|A(r)|`; zero for resources outside the election.
    pub fn approval_count(&self, r: ResourceId) -> usize {
        self.approvers(r).len()
    }

    pub fn total_approvals(&self) -> usize {
        self.ballots.iter().map(Vec::len).sum()
    }

    /// Checks that the ballot and approver indexes describe the same incidence.
    pub fn is_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.resources.len()];
        for (agent, ballot) in self.ballots.iter().enumerate() {
            if ballot.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &pos in ballot {
                match rebuilt.get_mut(pos as usize) {
                    Some(col) => col.push(agent as u32),
                    None => return false,
                }
            }
        }
        rebuilt == self.approvers
    }
}

/// An election with nonnegative real utilities. Only positive utilities are
/// stored; a missing entry means utility zero.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityElection {
    resources: Vec<ResourceId>,
    ballots: Vec<Vec<(u32, f64)>>,
    columns: Vec<Vec<(u32, f64)>>,
}

impl UtilityElection {
    /// Builds an election from per-agent `(resource, utility)` lists.
    /// Zero utilities are dropped; negative or non-finite ones are rejected,
    /// as is a resource listed twice for the same agent.
    pub fn new(
        resources: impl IntoIterator<Item = ResourceId>,
        utilities: Vec<Vec<(ResourceId, f64)>>,
    ) -> Result<Self> {
        let resources = sorted_unique(resources);
        let mut ballots = Vec::with_capacity(utilities.len());
        for row in utilities {
            let mut indexed = Vec::with_capacity(row.len());
            for (r, u) in row {
                let pos = locate(&resources, r).ok_or(Error::UnknownResource(r))?;
                if !u.is_finite() || u < 0.0 {
                    return Err(Error::InvalidUtility {
                        resource: r,
                        value: u,
                    });
                }
                if u > 0.0 {
                    indexed.push((pos as u32, u));
                }
            }
            indexed.sort_unstable_by_key(|&(pos, _)| pos);
            if let Some(w) = indexed.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidParameter(format!(
                    "resource {} listed twice in one agent's utilities",
                    resources[w[0].0 as usize]
                )));
            }
            ballots.push(indexed);
        }
        Ok(Self::from_indexed(resources, ballots))
    }

    /// Utility 1 for every approval.
    pub fn from_approval(election: &ApprovalElection) -> Self {
        let ballots = election
            .ballots
            .iter()
            .map(|b| b.iter().map(|&pos| (pos, 1.0)).collect())
            .collect();
        Self::from_indexed(election.resources.clone(), ballots)
    }

    /// Ballots must be sorted by position, positive, and duplicate-free.
    pub(crate) fn from_indexed(resources: Vec<ResourceId>, ballots: Vec<Vec<(u32, f64)>>) -> Self {
        let mut columns = vec![Vec::new(); resources.len()];
        for (agent, ballot) in ballots.iter().enumerate() {
            debug_assert!(ballot.windows(2).all(|w| w[0].0 < w[1].0));
            for &(pos, u) in ballot {
                debug_assert!(u > 0.0 && u.is_finite());
                columns[pos as usize].push((agent as u32, u));
            }
        }
        Self {
            resources,
            ballots,
            columns,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.ballots.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    /// Resources in ascending id order.
    pub fn resources(&self) -> &[ResourceId] {
        &self.resources
    }

    pub fn contains(&self, r: ResourceId) -> bool {
        self.position(r).is_some()
    }

    pub fn position(&self, r: ResourceId) -> Option<usize> {
        locate(&self.resources, r)
    }

    /// `u_agent(r)`, zero when absent.
    pub fn utility(&self, agent: usize, r: ResourceId) -> f64 {
        self.position(r).map_or(0.0, |pos| self.utility_at(agent, pos))
    }

    pub(crate) fn utility_at(&self, agent: usize, pos: usize) -> f64 {
        let ballot = &self.ballots[agent];
        match ballot.binary_search_by_key(&(pos as u32), |&(p, _)| p) {
            Ok(i) => ballot[i].1,
            Err(_) => 0.0,
        }
    }

    /// Positive utilities of `agent`, ascending by resource id.
    pub fn ballot(&self, agent: usize) -> impl Iterator<Item = (ResourceId, f64)> + '_ {
        self.ballots[agent]
            .iter()
            .map(move |&(pos, u)| (self.resources[pos as usize], u))
    }

    /// `(agent, utility)` pairs for the resource at `pos`, ascending by agent.
    pub(crate) fn column(&self, pos: usize) -> &[(u32, f64)] {
        &self.columns[pos]
    }

    /// Number of agents with positive utility for `r`.
    pub fn supporter_count(&self, r: ResourceId) -> usize {
        self.position(r).map_or(0, |pos| self.columns[pos].len())
    }

    /// Sum of all agents' utilities for `r`.
    pub fn total_utility(&self, r: ResourceId) -> f64 {
        self.position(r).map_or(0.0, |pos| self.total_utility_at(pos))
    }

    pub(crate) fn total_utility_at(&self, pos: usize) -> f64 {
        let mut values: Vec<f64> = self.columns[pos].iter().map(|&(_, u)| u).collect();
        canonical_sum(&mut values)
    }

    /// The same election with agents listed in a different order:
    /// agent `i` of the result is agent `order[i]` of `self`.
    pub fn permute_agents(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_agents() {
            return Err(Error::LengthMismatch {
                expected: self.n_agents(),
                actual: order.len(),
            });
        }
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(
                    "agent order is not a permutation".into(),
                ));
            }
        }
        let ballots = order.iter().map(|&i| self.ballots[i].clone()).collect();
        Ok(Self::from_indexed(self.resources.clone(), ballots))
    }
}

/// The solver that produced a committee.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exact,
    Greedy,
    #[serde(rename = "anneal", alias = "annealing")]
    Annealing,
    BruteForce,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Greedy => "greedy",
            Algorithm::Annealing => "anneal",
            Algorithm::BruteForce => "bruteforce",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" | "exact0" => Ok(Algorithm::Exact),
            "greedy" => Ok(Algorithm::Greedy),
            "anneal" | "annealing" => Ok(Algorithm::Annealing),
            "bruteforce" | "brute-force" => Ok(Algorithm::BruteForce),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?} (expected exact, greedy or anneal)"
            ))),
        }
    }
}

/// A winning (or approximately winning) committee.
#[derive(Clone, Debug, PartialEq)]
pub struct Committee {
    /// Members in solver order: selection order for the exact and greedy
    /// solvers, arbitrary but seed-determined for annealing.
    pub members: Vec<ResourceId>,
    /// The λ-score of `members` under the rule that produced it.
    pub score: f64,
    pub algorithm: Algorithm,
    /// The annealing seed, when one was used.
    pub seed: Option<u64>,
}

impl Committee {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: ResourceId) -> bool {
        self.members.contains(&r)
    }

    /// 1-based selection round of each member, for solvers that build the
    /// committee one member at a time.
    pub fn iteration(&self, position: usize) -> Option<usize> {
        match self.algorithm {
            Algorithm::Exact | Algorithm::Greedy => Some(position + 1),
            Algorithm::Annealing | Algorithm::BruteForce => None,
        }
    }

    /// Members sorted by id.
    pub fn sorted_members(&self) -> Vec<ResourceId> {
        let mut m = self.members.clone();
        m.sort_unstable();
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ResourceId> {
        v.iter().copied().map(ResourceId).collect()
    }

    #[test]
    fn approval_indexes_agree() {
        let e = ApprovalElection::new(
            ids(&[3, 1, 2]),
            vec![ids(&[1, 2]), ids(&[2, 2, 3]), vec![]],
        )
        .unwrap();
        assert_eq!(e.n_agents(), 3);
        assert_eq!(e.resources(), &ids(&[1, 2, 3])[..]);
        assert_eq!(e.approvers(ResourceId(2)), &[0, 1]);
        assert_eq!(e.approval_count(ResourceId(3)), 1);
        assert_eq!(e.approval_count(ResourceId(9)), 0);
        assert_eq!(e.total_approvals(), 4);
        assert!(e.is_consistent());
    }

    #[test]
    fn approval_rejects_unknown_resource() {
        let err = ApprovalElection::new(ids(&[1]), vec![ids(&[2])]).unwrap_err();
        assert!(matches!(err, Error::UnknownResource(ResourceId(2))));
    }

    #[test]
    fn utility_drops_zeros_and_rejects_negatives() {
        let e = UtilityElection::new(
            ids(&[1, 2]),
            vec![vec![(ResourceId(1), 0.0), (ResourceId(2), 2.5)]],
        )
        .unwrap();
        assert_eq!(e.ballot(0).collect::<Vec<_>>(), vec![(ResourceId(2), 2.5)]);
        assert_eq!(e.supporter_count(ResourceId(1)), 0);
        assert_eq!(e.utility(0, ResourceId(2)), 2.5);

        let err =
            UtilityElection::new(ids(&[1]), vec![vec![(ResourceId(1), -1.0)]]).unwrap_err();
        assert!(matches!(err, Error::InvalidUtility { .. }));
        let err = UtilityElection::new(ids(&[1]), vec![vec![(ResourceId(1), f64::NAN)]])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidUtility { .. }));
    }

    #[test]
    fn utility_rejects_duplicate_entries() {
        let err = UtilityElection::new(
            ids(&[1]),
            vec![vec![(ResourceId(1), 1.0), (ResourceId(1), 2.0)]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn from_approval_gives_unit_utilities() {
        let a = ApprovalElection::new(ids(&[1, 2]), vec![ids(&[1]), ids(&[1, 2])]).unwrap();
        let u = UtilityElection::from_approval(&a);
        assert_eq!(u.total_utility(ResourceId(1)), 2.0);
        assert_eq!(u.total_utility(ResourceId(2)), 1.0);
    }

    #[test]
    fn permute_agents_checks_permutation() {
        let a = ApprovalElection::new(ids(&[1]), vec![ids(&[1]), vec![]]).unwrap();
        let u = UtilityElection::from_approval(&a);
        let p = u.permute_agents(&[1, 0]).unwrap();
        assert_eq!(p.utility(1, ResourceId(1)), 1.0);
        assert_eq!(p.utility(0, ResourceId(1)), 0.0);
        assert!(u.permute_agents(&[0, 0]).is_err());
        assert!(u.permute_agents(&[0]).is_err());
    }
}
