//! Synthetic elections with known category structure, and the
//! focus-versus-breadth histogram experiment run on them.
//!
//! Movies are labelled `u.v(i)`: category `u`, subcategory `v`, index `i`
//! within the subcategory, all 1-based. Lower indices have higher quality.
//! Each voter draws a private permutation of the preference profile over
//! categories, and another over the subcategories of each category. An
//! approval is then sampled as category, subcategory, and a movie chosen
//! proportionally to quality; repeated draws collapse.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CatalogEntry};
use crate::election::{Algorithm, ApprovalElection, ResourceId};
use crate::error::{Error, Result};
use crate::owa::Exponent;
use crate::search::{Gamma, LocalElection};
use crate::seed::derive_seed;
use crate::solvers::AnnealingConfig;

pub const DEFAULT_PROFILE: [f64; 9] = [0.5, 0.1, 0.1, 0.1, 0.1, 0.025, 0.025, 0.025, 0.025];

/// `q(i) = 2 − atan((i − 13) / 10)` for a movie index `1 ≤ i ≤ 25`.
pub fn quality_factor(i: usize) -> Result<f64> {
    if !(1..=25).contains(&i) {
        return Err(Error::InvalidParameter(format!(
            "quality factor is defined for movie indices 1..=25, got {i}"
        )));
    }
    Ok(quality_curve(i))
}

fn quality_curve(i: usize) -> f64 {
    2.0 - ((i as f64 - 13.0) / 10.0).atan()
}

/// Draws indices with probability proportional to fixed weights by
/// inverting the cumulative sum.
#[derive(Clone, Debug)]
pub struct CumulativeSampler {
    cumulative: Vec<f64>,
}

impl CumulativeSampler {
    /// Weights must be nonnegative with a positive sum.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("sampler weights must be finite and >= 0".into()));
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if acc <= 0.0 {
            return Err(Error::InvalidParameter("sampler weights sum to zero".into()));
        }
        Ok(Self { cumulative })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let target = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MovieLabel {
    pub category: usize,
    pub subcategory: usize,
    pub index: usize,
}

impl MovieLabel {
    pub fn new(category: usize, subcategory: usize, index: usize) -> Self {
        Self {
            category,
            subcategory,
            index,
        }
    }
}

impl fmt::Display for MovieLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}({})", self.category, self.subcategory, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub categories: usize,
    pub subcategories: usize,
    pub movies_per_sub: usize,
    pub voters: usize,
    pub draws_per_voter: usize,
    pub seed: u64,
    /// Permuted per voter over categories, and over each category's
    /// subcategories; its length equals both counts.
    pub preference_profile: Vec<f64>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            categories: 9,
            subcategories: 9,
            movies_per_sub: 25,
            voters: 2000,
            draws_per_voter: 162,
            seed: 0,
            preference_profile: DEFAULT_PROFILE.to_vec(),
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.categories,
            self.subcategories,
            self.movies_per_sub,
            self.voters,
            self.draws_per_voter,
        ];
        if counts.contains(&0) {
            return Err(Error::InvalidParameter("synthetic counts must be positive".into()));
        }
        if self.preference_profile.len() != self.categories
            || self.preference_profile.len() != self.subcategories
        {
            return Err(Error::InvalidParameter(format!(
                "preference profile has {} entries; categories ({}) and subcategories ({}) must match it",
                self.preference_profile.len(),
                self.categories,
                self.subcategories
            )));
        }
        let sum: f64 = self.preference_profile.iter().sum();
        if self.preference_profile.iter().any(|&w| w.is_nan() || w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "preference profile must be nonnegative and sum to 1, sums to {sum}"
            )));
        }
        Ok(())
    }

    pub fn n_movies(&self) -> usize {
        self.categories * self.subcategories * self.movies_per_sub
    }

    pub fn resource_id(&self, label: MovieLabel) -> Result<ResourceId> {
        let ok = (1..=self.categories).contains(&label.category)
            && (1..=self.subcategories).contains(&label.subcategory)
            && (1..=self.movies_per_sub).contains(&label.index);
        if !ok {
            return Err(Error::InvalidParameter(format!("no synthetic movie {label}")));
        }
        Ok(self.id_unchecked(label.category - 1, label.subcategory - 1, label.index - 1))
    }

    fn id_unchecked(&self, u: usize, v: usize, i: usize) -> ResourceId {
        ResourceId(((u * self.subcategories + v) * self.movies_per_sub + i) as u32)
    }

    pub fn label(&self, id: ResourceId) -> Option<MovieLabel> {
        let raw = id.0 as usize;
        if raw >= self.n_movies() {
            return None;
        }
        let i = raw % self.movies_per_sub;
        let v = (raw / self.movies_per_sub) % self.subcategories;
        let u = raw / (self.movies_per_sub * self.subcategories);
        Some(MovieLabel::new(u + 1, v + 1, i + 1))
    }
}

/// A generated election with its labels encoded in the catalog titles.
#[derive(Clone, Debug)]
pub struct SyntheticElection {
    pub config: SyntheticConfig,
    pub election: ApprovalElection,
    pub catalog: Catalog,
}

pub fn generate_election(cfg: &SyntheticConfig) -> Result<SyntheticElection> {
    generate_relabeled(cfg, None)
}

/// Like [`generate_election`], but a voter's `c`-th sampled category is
/// labelled `relabel[c]` (0-based). The random stream does not depend on
/// the relabelling.
pub fn generate_relabeled(cfg: &SyntheticConfig, relabel: Option<&[usize]>) -> Result<SyntheticElection> {
    cfg.validate()?;
    let identity: Vec<usize> = (0..cfg.categories).collect();
    let relabel = relabel.unwrap_or(&identity);
    check_permutation(relabel, cfg.categories)?;

    let quality: Vec<f64> = (1..=cfg.movies_per_sub).map(quality_curve).collect();
    let quality = CumulativeSampler::new(&quality)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut profile = cfg.preference_profile.clone();
    let mut ballots = Vec::with_capacity(cfg.voters);

    for _ in 0..cfg.voters {
        profile.shuffle(&mut rng);
        let categories = CumulativeSampler::new(&profile)?;
        let mut subcategories = Vec::with_capacity(cfg.categories);
        for _ in 0..cfg.categories {
            profile.shuffle(&mut rng);
            subcategories.push(CumulativeSampler::new(&profile)?);
        }
        let mut ballot: Vec<u32> = (0..cfg.draws_per_voter)
            .map(|_| {
                let u = categories.sample(&mut rng);
                let v = subcategories[u].sample(&mut rng);
                let i = quality.sample(&mut rng);
                cfg.id_unchecked(relabel[u], v, i).0
            })
            .collect();
        ballot.sort_unstable();
        ballot.dedup();
        ballots.push(ballot);
    }

    let resources: Vec<ResourceId> = (0..cfg.n_movies() as u32).map(ResourceId).collect();
    let mut catalog = Catalog::new();
    for &id in &resources {
        let label = cfg.label(id).unwrap();
        catalog.insert(
            id,
            CatalogEntry {
                title: label.to_string(),
                genres: vec![
                    format!("Category {}", label.category),
                    format!("Subcategory {}.{}", label.category, label.subcategory),
                ],
            },
        );
    }
    Ok(SyntheticElection {
        config: cfg.clone(),
        election: ApprovalElection::from_indexed(resources, ballots),
        catalog,
    })
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &c in perm {
        if c >= n || std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidParameter(format!(
                "category relabelling {perm:?} is not a permutation of 0..{n}"
            )));
        }
    }
    if perm.len() != n {
        return Err(Error::InvalidParameter(format!(
            "category relabelling needs {n} entries, got {}",
            perm.len()
        )));
    }
    Ok(())
}

/// `(x, y, z)`: selections in the query's subcategory, in the rest of its
/// category, and everywhere else.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Xyz {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl fmt::Display for Xyz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Selection counts per (category, subcategory), indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcategoryHistogram {
    pub counts: Vec<Vec<u64>>,
    pub query: MovieLabel,
}

impl SubcategoryHistogram {
    pub fn new(categories: usize, subcategories: usize, query: MovieLabel) -> Self {
        Self {
            counts: vec![vec![0; subcategories]; categories],
            query,
        }
    }

    pub fn record(&mut self, label: MovieLabel) {
        self.counts[label.category - 1][label.subcategory - 1] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn summary(&self) -> Xyz {
        let row = &self.counts[self.query.category - 1];
        let x = row[self.query.subcategory - 1];
        let y = row.iter().sum::<u64>() - x;
        Xyz {
            x,
            y,
            z: self.total() - x - y,
        }
    }

    fn merge(&mut self, other: &Self) {
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// `synthetic.seed` is the master seed.
    pub synthetic: SyntheticConfig,
    pub trials: usize,
    pub k: usize,
    pub gamma: Gamma,
    pub p_values: Vec<Exponent>,
    pub algorithms: Vec<Algorithm>,
    pub query: MovieLabel,
    /// `seed` is replaced per (trial, p).
    pub annealing: AnnealingConfig,
    /// Category relabelling applied during generation and undone when
    /// tallying.
    pub relabel: Option<Vec<usize>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            synthetic: SyntheticConfig::default(),
            trials: 100,
            k: 10,
            gamma: Gamma::default(),
            p_values: (0..4).map(Exponent::Finite).collect(),
            algorithms: vec![Algorithm::Greedy, Algorithm::Annealing],
            query: MovieLabel::new(1, 1, 13),
            annealing: AnnealingConfig::default(),
            relabel: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRun {
    pub p: Exponent,
    pub algorithm: Algorithm,
    pub histogram: SubcategoryHistogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub seed: u64,
    pub trials: usize,
    pub k: usize,
    pub gamma: f64,
    /// One run per (p, algorithm), p-major.
    pub runs: Vec<HistogramRun>,
    /// Elections regenerated because nobody approved the query movie.
    pub regenerated: usize,
}

impl ExperimentOutcome {
    pub fn run(&self, p: Exponent, algorithm: Algorithm) -> Option<&HistogramRun> {
        self.runs
            .iter()
            .find(|r| r.p == p && r.algorithm == algorithm)
    }
}

const MAX_ATTEMPTS: u64 = 1000;

fn p_code(p: Exponent) -> u64 {
    match p {
        Exponent::Finite(v) => u64::from(v),
        Exponent::Infinity => u64::MAX,
    }
}

/// Per-trial election seed: `derive_seed(master, [trial, attempt])`.
/// Per-(trial, p) annealing seed: `derive_seed(master, [trial, attempt, p, 1])`
/// with `p = ∞` encoded as `u64::MAX`.
pub fn run_histogram_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.synthetic.validate()?;
    cfg.annealing.validate()?;
    if cfg.k == 0 {
        return Err(Error::EmptyCommittee);
    }
    let relabel: Vec<usize> = cfg
        .relabel
        .clone()
        .unwrap_or_else(|| (0..cfg.synthetic.categories).collect());
    check_permutation(&relabel, cfg.synthetic.categories)?;
    let mut unlabel = vec![0; relabel.len()];
    for (original, &label) in relabel.iter().enumerate() {
        unlabel[label] = original;
    }
    let query = MovieLabel {
        category: relabel[cfg.query.category - 1] + 1,
        ..cfg.query
    };
    let query_id = cfg.synthetic.resource_id(query)?;
    let master = cfg.synthetic.seed;

    let tallies: Vec<(usize, Vec<SubcategoryHistogram>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<_> {
            let (election, attempts) = (0..MAX_ATTEMPTS)
                .find_map(|attempt| {
                    let synthetic = SyntheticConfig {
                        seed: derive_seed(master, &[trial as u64, attempt]),
                        ..cfg.synthetic.clone()
                    };
                    let generated = generate_relabeled(&synthetic, Some(&relabel));
                    match generated {
                        Ok(g) if g.election.approval_count(query_id) == 0 => {
                            log::info!("trial {trial}: query movie has no approvers, regenerating");
                            None
                        }
                        other => Some(other.map(|g| (g, attempt))),
                    }
                })
                .ok_or(Error::NoSupporters)??;
            let local = LocalElection::build(&election.election, &[query_id], cfg.gamma)?;
            let k = cfg.k.min(local.resources().len());
            let mut out = Vec::with_capacity(cfg.p_values.len() * cfg.algorithms.len());
            for &p in &cfg.p_values {
                for &algorithm in &cfg.algorithms {
                    let annealing = AnnealingConfig {
                        seed: derive_seed(master, &[trial as u64, attempts, p_code(p), 1]),
                        ..cfg.annealing
                    };
                    let committee = local.solve(p, k, algorithm, annealing)?;
                    let mut histogram = SubcategoryHistogram::new(
                        cfg.synthetic.categories,
                        cfg.synthetic.subcategories,
                        cfg.query,
                    );
                    for &id in &committee.members {
                        let label = cfg.synthetic.label(id).unwrap();
                        histogram.record(MovieLabel {
                            category: unlabel[label.category - 1] + 1,
                            ..label
                        });
                    }
                    out.push(histogram);
                }
            }
            Ok((attempts as usize, out))
        })
        .collect::<Result<_>>()?;

    let mut runs: Vec<HistogramRun> = cfg
        .p_values
        .iter()
        .flat_map(|&p| {
            cfg.algorithms.iter().map(move |&algorithm| HistogramRun {
                p,
                algorithm,
                histogram: SubcategoryHistogram::new(
                    cfg.synthetic.categories,
                    cfg.synthetic.subcategories,
                    cfg.query,
                ),
            })
        })
        .collect();
    let mut regenerated = 0;
    for (attempts, histograms) in &tallies {
        regenerated += attempts;
        for (run, h) in runs.iter_mut().zip(histograms) {
            run.histogram.merge(h);
        }
    }
    Ok(ExperimentOutcome {
        seed: master,
        trials: cfg.trials,
        k: cfg.k,
        gamma: cfg.gamma.value(),
        runs,
        regenerated,
    })
}
