//! Effective run settings: command-line flag, then config file, then the
//! built-in default.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use votesearch_core::owa::Exponent;
use votesearch_core::solvers::AnnealingConfig;

pub const DEFAULT_CACHE: &str = "votesearch.cache";

/// Contents of a `--config` TOML file; every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cache: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub k: Option<usize>,
    pub p: Option<Exponent>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub annealing: FileAnnealing,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileAnnealing {
    pub steps: Option<usize>,
    pub t_max: Option<f64>,
    pub t_min: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }
}

/// Values given on the command line, shared by all subcommands.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlagConfig {
    pub cache: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub k: Option<usize>,
    pub p: Option<Exponent>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub cache_path: PathBuf,
    pub gamma: f64,
    pub k: usize,
    pub p: Exponent,
    pub seed: u64,
    pub annealing: AnnealingConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_path: PathBuf::from(DEFAULT_CACHE),
            gamma: 2.0,
            k: 10,
            p: Exponent::Finite(1),
            seed: 0,
            annealing: AnnealingConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: &FlagConfig, file: &FileConfig) -> Self {
        let base = Self::default();
        let seed = flags.seed.or(file.seed).unwrap_or(base.seed);
        Self {
            cache_path: flags.cache.clone().or(file.cache.clone()).unwrap_or(base.cache_path),
            gamma: flags.gamma.or(file.gamma).unwrap_or(base.gamma),
            k: flags.k.or(file.k).unwrap_or(base.k),
            p: flags.p.or(file.p).unwrap_or(base.p),
            seed,
            annealing: AnnealingConfig {
                steps: flags.steps.or(file.annealing.steps).unwrap_or(base.annealing.steps),
                t_max: file.annealing.t_max.unwrap_or(base.annealing.t_max),
                t_min: file.annealing.t_min.unwrap_or(base.annealing.t_min),
                seed,
            },
        }
    }
}
