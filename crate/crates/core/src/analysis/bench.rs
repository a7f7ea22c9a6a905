use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::{Algorithm, ApprovalElection, ResourceId};
use crate::error::{Error, Result};
use crate::owa::Exponent;
use crate::search::{Gamma, LocalElection};
use crate::seed::derive_seed;
use crate::solvers::AnnealingConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sample_size: usize,
    pub p_values: Vec<Exponent>,
    pub k: usize,
    /// Drives the sample and, per (movie, p), the annealing seed.
    pub seed: u64,
    pub gamma: Gamma,
    pub annealing: AnnealingConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sample_size: 1000,
            p_values: (1..4).map(Exponent::Finite).collect(),
            k: 10,
            seed: 0,
            gamma: Gamma::default(),
            annealing: AnnealingConfig::default(),
        }
    }
}

/// Per-movie scores; vectors are aligned with `BenchConfig::p_values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: ResourceId,
    pub global_approvals: usize,
    pub local_resources: usize,
    pub greedy: Vec<f64>,
    pub annealing: Vec<f64>,
    /// Greedy score over annealing score.
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub p: Exponent,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single movie.
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub seed: u64,
    pub k: usize,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<BenchSummary>,
    /// Sampled movies dropped for an empty local election or a zero score.
    pub skipped: Vec<ResourceId>,
}

fn p_code(p: Exponent) -> u64 {
    match p {
        Exponent::Finite(v) => u64::from(v),
        Exponent::Infinity => u64::MAX,
    }
}

fn bench_one(global: &ApprovalElection, id: ResourceId, cfg: &BenchConfig) -> Result<Option<BenchRow>> {
    let local = match LocalElection::build(global, &[id], cfg.gamma) {
        Ok(local) if !local.is_empty() => local,
        Ok(_) | Err(Error::NoSupporters) => return Ok(None),
        Err(e) => return Err(e),
    };
    let k = cfg.k.min(local.resources().len());
    let mut row = BenchRow {
        id,
        global_approvals: global.approval_count(id),
        local_resources: local.resources().len(),
        greedy: Vec::new(),
        annealing: Vec::new(),
        ratios: Vec::new(),
    };
    for &p in &cfg.p_values {
        let greedy = local.solve(p, k, Algorithm::Greedy, cfg.annealing)?;
        let annealing = AnnealingConfig {
            seed: derive_seed(cfg.seed, &[u64::from(id.0), p_code(p)]),
            ..cfg.annealing
        };
        let annealed = local.solve(p, k, Algorithm::Annealing, annealing)?;
        if annealed.score <= 0.0 {
            return Ok(None);
        }
        row.ratios.push(greedy.score / annealed.score);
        row.greedy.push(greedy.score);
        row.annealing.push(annealed.score);
    }
    Ok(Some(row))
}

/// Scores greedy against annealing on singleton queries drawn uniformly,
/// without replacement, from the resources with a nonempty local election.
pub fn bench_algorithms(global: &ApprovalElection, cfg: &BenchConfig) -> Result<BenchOutcome> {
    if cfg.k == 0 {
        return Err(Error::EmptyCommittee);
    }
    if cfg.p_values.is_empty() {
        return Err(Error::InvalidParameter("bench needs at least one p value".into()));
    }
    cfg.annealing.validate()?;
    let mut candidates = global.resources().to_vec();
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));

    let mut rows = Vec::with_capacity(cfg.sample_size);
    let mut skipped = Vec::new();
    let mut rest = &candidates[..];
    while rows.len() < cfg.sample_size && !rest.is_empty() {
        let (batch, tail) = rest.split_at((cfg.sample_size - rows.len()).min(rest.len()));
        rest = tail;
        let results: Vec<Option<BenchRow>> = batch
            .par_iter()
            .map(|&id| bench_one(global, id, cfg))
            .collect::<Result<_>>()?;
        for (&id, result) in batch.iter().zip(results) {
            match result {
                Some(row) => rows.push(row),
                None => {
                    log::info!("skipping resource {id}: degenerate local election");
                    skipped.push(id);
                }
            }
        }
    }
    if rows.len() < cfg.sample_size {
        log::warn!(
            "only {} eligible resources, fewer than the requested sample of {}",
            rows.len(),
            cfg.sample_size
        );
    }

    let summary = cfg
        .p_values
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let ratios: Vec<f64> = rows.iter().map(|r| r.ratios[i]).collect();
            let count = ratios.len();
            let mean = ratios.iter().sum::<f64>() / count.max(1) as f64;
            let var = if count > 1 {
                ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            BenchSummary {
                p,
                count,
                mean,
                std: var.sqrt(),
            }
        })
        .collect();
    Ok(BenchOutcome {
        seed: cfg.seed,
        k: cfg.k,
        rows,
        summary,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate_election, SyntheticConfig};

    fn small() -> ApprovalElection {
        generate_election(&SyntheticConfig {
            categories: 3,
            subcategories: 3,
            movies_per_sub: 4,
            voters: 60,
            draws_per_voter: 8,
            seed: 2,
            preference_profile: vec![0.6, 0.3, 0.1],
        })
        .unwrap()
        .election
    }

    fn quick(sample_size: usize) -> BenchConfig {
        BenchConfig {
            sample_size,
            k: 3,
            seed: 5,
            annealing: AnnealingConfig {
                steps: 3000,
                ..AnnealingConfig::default()
            },
            ..BenchConfig::default()
        }
    }

    #[test]
    fn ratios_are_positive_and_deterministic() {
        let g = small();
        let out = bench_algorithms(&g, &quick(8)).unwrap();
        assert_eq!(out.rows.len(), 8);
        assert!(out.rows.iter().flat_map(|r| &r.ratios).all(|&x| x > 0.0));
        assert_eq!(out, bench_algorithms(&g, &quick(8)).unwrap());
        assert_eq!(out.summary.len(), 3);
    }

    #[test]
    fn oversized_sample_takes_every_eligible_movie() {
        let g = small();
        let out = bench_algorithms(&g, &quick(1000)).unwrap();
        assert_eq!(out.rows.len() + out.skipped.len(), g.n_resources());
    }
}
