//! Query-specific elections and the search pipeline.
//!
//! For a query set `Q`, the local approval election keeps the agents that
//! approve at least one member of `Q` and the resources they approve, minus
//! `Q`. Each local resource gets a TF-IDF relevance
//!
//! ```text
//! tf-idf_γ(r) = |A_local(r)| · γ^ln(n / |A(r)|) = |A_local(r)| / |A(r)|^ln γ · n^ln γ
//! ```
//!
//! which is split evenly among its local approvers to form the local utility
//! election. A resource's total utility is therefore its TF-IDF value.

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::election::{Algorithm, ApprovalElection, Committee, ResourceId, UtilityElection};
use crate::error::{Error, Result};
use crate::owa::{Exponent, HuvParams};
use crate::solvers::{
    solve_annealing, solve_bruteforce, solve_exact_p0, solve_greedy, AnnealingConfig,
};

/// The TF-IDF balance constant. Stores `ln γ` alongside `γ` so that
/// `ln γ` can be given exactly.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Gamma {
    value: f64,
    ln: f64,
}

impl Gamma {
    /// `γ ≥ 1`; `γ = 1` disables the IDF component.
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be a finite number >= 1, got {value}"
            )));
        }
        Ok(Self {
            value,
            ln: value.ln(),
        })
    }

    /// Builds `γ = e^ln_gamma`.
    pub fn from_ln(ln_gamma: f64) -> Result<Self> {
        if !(ln_gamma.is_finite() && ln_gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ln(gamma) must be a finite number >= 0, got {ln_gamma}"
            )));
        }
        Ok(Self {
            value: ln_gamma.exp(),
            ln: ln_gamma,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn ln(self) -> f64 {
        self.ln
    }
}

impl Default for Gamma {
    fn default() -> Self {
        Self::new(2.0).unwrap()
    }
}

/// `|A_local(r)| / |A(r)|^ln γ · n^ln γ`.
pub fn tfidf_value(local_approvals: usize, global_approvals: usize, global_n: usize, gamma: Gamma) -> f64 {
    let l = gamma.ln();
    local_approvals as f64 / (global_approvals as f64).powf(l) * (global_n as f64).powf(l)
}

/// The local approval election of a query, together with the global counts
/// TF-IDF needs.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalApproval {
    pub query: Vec<ResourceId>,
    pub election: ApprovalElection,
    /// Global index of each local agent.
    pub agents: Vec<u32>,
    /// `|A(r)|` for each local resource, aligned with `election.resources()`.
    pub global_approvals: Vec<u32>,
    /// Number of agents in the global election.
    pub global_n: usize,
}

impl LocalApproval {
    pub fn local_approvals(&self, r: ResourceId) -> usize {
        self.election.approval_count(r)
    }

    pub fn global_approvals(&self, r: ResourceId) -> usize {
        self.election
            .position(r)
            .map_or(0, |pos| self.global_approvals[pos] as usize)
    }

    /// TF-IDF of `r`, or `None` when `r` is not a local resource.
    pub fn tfidf_score(&self, r: ResourceId, gamma: Gamma) -> Option<f64> {
        let pos = self.election.position(r)?;
        Some(self.tfidf_at(pos, gamma))
    }

    fn tfidf_at(&self, pos: usize, gamma: Gamma) -> f64 {
        tfidf_value(
            self.election.approvers_at(pos).len(),
            self.global_approvals[pos] as usize,
            self.global_n,
            gamma,
        )
    }

    /// TF-IDF of every local resource, aligned with `election.resources()`.
    pub fn tfidf(&self, gamma: Gamma) -> Vec<f64> {
        (0..self.election.n_resources())
            .map(|pos| self.tfidf_at(pos, gamma))
            .collect()
    }
}

fn normalize_query(global: &ApprovalElection, query: &[ResourceId]) -> Result<Vec<ResourceId>> {
    if query.is_empty() {
        return Err(Error::InvalidParameter("query set is empty".into()));
    }
    let mut q = query.to_vec();
    q.sort_unstable();
    q.dedup();
    if let Some(&missing) = q.iter().find(|&&r| !global.contains(r)) {
        return Err(Error::UnknownResource(missing));
    }
    Ok(q)
}

/// Restricts `global` to the agents approving some query member and the
/// resources they approve, excluding the query itself.
pub fn derive_local_approval(global: &ApprovalElection, query: &[ResourceId]) -> Result<LocalApproval> {
    let query = normalize_query(global, query)?;
    let mut agents: Vec<u32> = query
        .iter()
        .flat_map(|&r| global.approvers(r).iter().copied())
        .collect();
    agents.sort_unstable();
    agents.dedup();
    if agents.is_empty() {
        return Err(Error::NoSupporters);
    }

    const ABSENT: u32 = u32::MAX;
    let mut local_pos = vec![ABSENT; global.n_resources()];
    let excluded: Vec<usize> = query.iter().filter_map(|&r| global.position(r)).collect();
    for &a in &agents {
        for &pos in global.ballot_positions(a as usize) {
            local_pos[pos as usize] = 0;
        }
    }
    for &pos in &excluded {
        local_pos[pos] = ABSENT;
    }
    let mut resources = Vec::new();
    let mut global_approvals = Vec::new();
    for (pos, slot) in local_pos.iter_mut().enumerate() {
        if *slot != ABSENT {
            *slot = resources.len() as u32;
            resources.push(global.resources()[pos]);
            global_approvals.push(global.approvers_at(pos).len() as u32);
        }
    }
    let ballots = agents
        .iter()
        .map(|&a| {
            global
                .ballot_positions(a as usize)
                .iter()
                .map(|&pos| local_pos[pos as usize])
                .filter(|&p| p != ABSENT)
                .collect()
        })
        .collect();

    Ok(LocalApproval {
        query,
        election: ApprovalElection::from_indexed(resources, ballots),
        agents,
        global_approvals,
        global_n: global.n_agents(),
    })
}

/// Gives each approver of `r` the utility `tfidf(r) / |A_local(r)|`.
pub fn derive_local_utility(local: &ApprovalElection, tfidf: &[f64]) -> Result<UtilityElection> {
    if tfidf.len() != local.n_resources() {
        return Err(Error::LengthMismatch {
            expected: local.n_resources(),
            actual: tfidf.len(),
        });
    }
    let share: Vec<f64> = (0..local.n_resources())
        .map(|pos| tfidf[pos] / local.approvers_at(pos).len().max(1) as f64)
        .collect();
    let ballots = (0..local.n_agents())
        .map(|a| {
            local
                .ballot_positions(a)
                .iter()
                .filter(|&&pos| share[pos as usize] > 0.0)
                .map(|&pos| (pos, share[pos as usize]))
                .collect()
        })
        .collect();
    Ok(UtilityElection::from_indexed(local.resources().to_vec(), ballots))
}

/// Everything derived from one query: local approvals, TF-IDF, utilities.
#[derive(Clone, Debug)]
pub struct LocalElection {
    pub approval: LocalApproval,
    pub gamma: Gamma,
    pub tfidf: Vec<f64>,
    pub utility: UtilityElection,
}

impl LocalElection {
    pub fn build(global: &ApprovalElection, query: &[ResourceId], gamma: Gamma) -> Result<Self> {
        let approval = derive_local_approval(global, query)?;
        let tfidf = approval.tfidf(gamma);
        let utility = derive_local_utility(&approval.election, &tfidf)?;
        Ok(Self {
            approval,
            gamma,
            tfidf,
            utility,
        })
    }

    pub fn resources(&self) -> &[ResourceId] {
        self.approval.election.resources()
    }

    pub fn is_empty(&self) -> bool {
        self.resources().is_empty()
    }

    pub fn tfidf_of(&self, r: ResourceId) -> Option<f64> {
        self.approval.election.position(r).map(|pos| self.tfidf[pos])
    }

    /// Local resources by TF-IDF, highest first, ties by ascending id.
    pub fn ranking(&self) -> Vec<ResourceId> {
        let mut order: Vec<usize> = (0..self.tfidf.len()).collect();
        order.sort_by(|&a, &b| self.tfidf[b].total_cmp(&self.tfidf[a]));
        order.into_iter().map(|pos| self.resources()[pos]).collect()
    }

    /// Winner determination on the local utility election. `p = 0` always
    /// uses the exact solver.
    pub fn solve(
        &self,
        p: Exponent,
        k: usize,
        algorithm: Algorithm,
        annealing: AnnealingConfig,
    ) -> Result<Committee> {
        let params = HuvParams::new(p, k)?;
        if p.is_zero() {
            return solve_exact_p0(&self.utility, k);
        }
        match algorithm {
            Algorithm::Greedy => solve_greedy(&self.utility, params),
            Algorithm::Annealing => solve_annealing(&self.utility, params, annealing),
            Algorithm::BruteForce => solve_bruteforce(&self.utility, params),
            Algorithm::Exact => Err(Error::InvalidParameter(format!(
                "the exact solver supports p = 0 only (got p = {p}); use greedy or anneal"
            ))),
        }
    }
}

/// A search request against the global election.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub resources: Vec<ResourceId>,
    pub gamma: Gamma,
    pub p: Exponent,
    pub k: usize,
    pub algorithm: Algorithm,
    pub annealing: AnnealingConfig,
}

impl Query {
    /// Defaults: `γ = 2`, `k = 10`, greedy.
    pub fn new(resources: Vec<ResourceId>, p: Exponent) -> Self {
        Self {
            resources,
            gamma: Gamma::default(),
            p,
            k: 10,
            algorithm: Algorithm::Greedy,
            annealing: AnnealingConfig::default(),
        }
    }

    /// The algorithm that actually runs: p = 0 is always solved exactly.
    pub fn effective_algorithm(&self) -> Algorithm {
        if self.p.is_zero() {
            Algorithm::Exact
        } else {
            self.algorithm
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberInfo {
    pub id: ResourceId,
    pub title: String,
    pub genres: Vec<String>,
    pub tfidf: f64,
    pub local_approvals: usize,
    pub global_approvals: usize,
    /// 1-based selection round, for solvers that add members one at a time.
    pub iteration: Option<usize>,
}

/// Search result in the shape shared by the CLI's JSON output and the service.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub query: Vec<ResourceId>,
    pub p: Exponent,
    pub k: usize,
    pub gamma: f64,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    /// Set when the local election had fewer than `k` resources.
    pub truncated: bool,
    pub members: Vec<MemberInfo>,
    pub score: f64,
}

impl SearchResult {
    pub fn member_ids(&self) -> Vec<ResourceId> {
        self.members.iter().map(|m| m.id).collect()
    }
}

/// Runs the full pipeline for `query` and annotates the committee.
pub fn search(global: &ApprovalElection, catalog: &Catalog, query: &Query) -> Result<SearchResult> {
    if query.k == 0 {
        return Err(Error::EmptyCommittee);
    }
    let local = LocalElection::build(global, &query.resources, query.gamma)?;
    if local.is_empty() {
        return Err(Error::NoResults);
    }
    let k = query.k.min(local.resources().len());
    let algorithm = query.effective_algorithm();
    let committee = local.solve(query.p, k, algorithm, query.annealing)?;
    Ok(describe(&local, catalog, query, &committee))
}

pub(crate) fn describe(
    local: &LocalElection,
    catalog: &Catalog,
    query: &Query,
    committee: &Committee,
) -> SearchResult {
    let members = committee
        .members
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let entry = catalog.get(id);
            MemberInfo {
                id,
                title: catalog.title(id),
                genres: entry.map(|e| e.genres.clone()).unwrap_or_default(),
                tfidf: local.tfidf_of(id).unwrap_or(0.0),
                local_approvals: local.approval.local_approvals(id),
                global_approvals: local.approval.global_approvals(id),
                iteration: committee.iteration(i),
            }
        })
        .collect();
    SearchResult {
        query: local.approval.query.clone(),
        p: query.p,
        k: query.k,
        gamma: query.gamma.value(),
        algorithm: committee.algorithm,
        seed: committee.seed,
        truncated: committee.len() < query.k,
        members,
        score: committee.score,
    }
}
