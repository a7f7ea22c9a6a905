//! Simulated annealing over size-k committees.
//!
//! The state is a committee, the energy its negated λ-score. A move swaps one
//! uniformly random member for one uniformly random non-member; it is
//! accepted with the Metropolis rule under an exponentially decaying
//! temperature. The best committee ever visited is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{Algorithm, Committee, UtilityElection};
use crate::error::{Error, Result};
use crate::owa::{huv_weights, HuvParams, OwaVector};
use crate::scoring::{canonical_sum, score_positions};

use super::check_committee_size;
use super::exact::rank_by_total;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AnnealingConfig {
    pub steps: usize,
    pub t_max: f64,
    pub t_min: f64,
    pub seed: u64,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        Self {
            steps: 50_000,
            t_max: 9900.0,
            t_min: 0.6,
            seed: 0,
        }
    }
}

impl AnnealingConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter("annealing needs at least one step".into()));
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "annealing temperatures must satisfy t_max > t_min > 0, got t_max={} t_min={}",
                self.t_max, self.t_min
            )));
        }
        Ok(())
    }

    /// Temperature at `step` (1-based): `t_max · (t_min / t_max)^(step / steps)`.
    pub fn temperature(&self, step: usize) -> f64 {
        let factor = -(self.t_max / self.t_min).ln();
        self.t_max * (factor * step as f64 / self.steps as f64).exp()
    }
}

/// Members held by each agent, with the agent's current OWA value cached.
struct AgentState {
    held: Vec<Vec<(u32, f64)>>,
    value: Vec<f64>,
}

impl AgentState {
    fn new(e: &UtilityElection, lambda: &OwaVector, members: &[usize]) -> Self {
        let mut held = vec![Vec::new(); e.n_agents()];
        for &pos in members {
            for &(agent, u) in e.column(pos) {
                held[agent as usize].push((pos as u32, u));
            }
        }
        let mut scratch = Vec::new();
        let value = held
            .iter()
            .map(|list| {
                scratch.clear();
                scratch.extend(list.iter().map(|&(_, u)| u));
                lambda.apply_unsorted(&mut scratch)
            })
            .collect();
        Self { held, value }
    }
}

/// A pending change to one agent: their new OWA value and the utilities
/// lost (`out`) and gained (`inn`) by the swap.
struct Change {
    agent: u32,
    out: bool,
    inn: Option<f64>,
    value: f64,
}

pub fn solve_annealing(
    e: &UtilityElection,
    params: HuvParams,
    cfg: AnnealingConfig,
) -> Result<Committee> {
    check_committee_size(e, params.k)?;
    cfg.validate()?;
    let lambda = huv_weights(params);
    let (m, k) = (e.n_resources(), params.k);

    let ranked = rank_by_total(e);
    let mut members: Vec<usize> = ranked[..k].to_vec();
    let mut outside: Vec<usize> = ranked[k..].to_vec();
    outside.sort_unstable();

    if k == m {
        members.sort_unstable();
        return Ok(finish(e, &lambda, &members, cfg.seed));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut agents = AgentState::new(e, &lambda, &members);
    let mut current = score_positions(e, &lambda, &members);
    let mut best = members.clone();
    let mut best_score = current;

    let mut changes: Vec<Change> = Vec::new();
    let mut deltas: Vec<f64> = Vec::new();
    let mut scratch: Vec<f64> = Vec::with_capacity(k);

    for step in 1..=cfg.steps {
        let temperature = cfg.temperature(step);
        let slot = rng.random_range(0..k);
        let pick = rng.random_range(0..m - k);
        let (out, inn) = (members[slot], outside[pick]);

        changes.clear();
        merge_columns(e.column(out), e.column(inn), |agent, lost, gained| {
            scratch.clear();
            scratch.extend(
                agents.held[agent as usize]
                    .iter()
                    .filter(|&&(pos, _)| !(lost && pos as usize == out))
                    .map(|&(_, u)| u),
            );
            scratch.extend(gained);
            changes.push(Change {
                agent,
                out: lost,
                inn: gained,
                value: lambda.apply_unsorted(&mut scratch),
            });
        });
        deltas.clear();
        deltas.extend(
            changes
                .iter()
                .map(|c| c.value - agents.value[c.agent as usize]),
        );
        let gain = canonical_sum(&mut deltas);

        let energy_delta = -gain;
        if energy_delta > 0.0 && (-energy_delta / temperature).exp() < rng.random::<f64>() {
            continue;
        }

        members[slot] = inn;
        outside[pick] = out;
        for c in &changes {
            let list = &mut agents.held[c.agent as usize];
            if c.out {
                list.retain(|&(pos, _)| pos as usize != out);
            }
            if let Some(u) = c.inn {
                list.push((inn as u32, u));
            }
            agents.value[c.agent as usize] = c.value;
        }
        current += gain;
        if current > best_score {
            best_score = current;
            best.clone_from(&members);
        }
    }

    Ok(finish(e, &lambda, &best, cfg.seed))
}

fn finish(e: &UtilityElection, lambda: &OwaVector, members: &[usize], seed: u64) -> Committee {
    Committee {
        members: members.iter().map(|&pos| e.resources()[pos]).collect(),
        score: score_positions(e, lambda, members),
        algorithm: Algorithm::Annealing,
        seed: Some(seed),
    }
}

/// Walks two agent-sorted columns together, calling `visit(agent, in_first,
/// utility_in_second)` once per agent present in either.
fn merge_columns(
    first: &[(u32, f64)],
    second: &[(u32, f64)],
    mut visit: impl FnMut(u32, bool, Option<f64>),
) {
    let (mut i, mut j) = (0, 0);
    while i < first.len() || j < second.len() {
        match (first.get(i), second.get(j)) {
            (Some(&(a, _)), Some(&(b, u))) if a == b => {
                visit(a, true, Some(u));
                i += 1;
                j += 1;
            }
            (Some(&(a, _)), Some(&(b, _))) if a < b => {
                visit(a, true, None);
                i += 1;
            }
            (Some(&(a, _)), None) => {
                visit(a, true, None);
                i += 1;
            }
            (_, Some(&(b, u))) => {
                visit(b, false, Some(u));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}
