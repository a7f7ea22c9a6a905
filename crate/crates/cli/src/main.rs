//! `votesearch`: build the global election, run searches and reproduce the
//! measurement experiments from the command line.
//!
//! Exit status: 0 on success, 1 on data errors, 2 on usage errors.

mod commands;
mod config;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use votesearch_core::owa::Exponent;
use votesearch_core::Algorithm;

use config::{FileConfig, FlagConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "votesearch", version, about = "Voting-based search with tunable diversity")]
struct Cli {
    /// Global election cache [default: votesearch.cache]
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// TOML file with defaults for cache, gamma, k, p, seed and [annealing]
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomised step
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the global election cache from MovieLens-format CSV files
    Ingest(IngestArgs),
    /// Search with one or more movies as the query
    Query(QueryArgs),
    /// Run the synthetic focus-versus-breadth experiment
    Synth(SynthArgs),
    /// Count family members among top TF-IDF results across gamma values
    Calibrate(CalibrateArgs),
    /// Lay out the extension of a movie set in the plane
    Embed(EmbedArgs),
    /// Compare greedy and annealing scores on sampled singleton queries
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Directory holding ratings.csv and movies.csv
    #[arg(long, conflicts_with_all = ["ratings", "movies", "synthetic"])]
    pub dir: Option<PathBuf>,
    #[arg(long, requires = "movies")]
    pub ratings: Option<PathBuf>,
    #[arg(long, requires = "ratings")]
    pub movies: Option<PathBuf>,
    /// Generate a synthetic election (seeded by --seed) instead of reading files
    #[arg(long)]
    pub synthetic: bool,
    /// Voters in the synthetic election
    #[arg(long, default_value_t = 2000, requires = "synthetic")]
    pub voters: usize,
    /// Lowest rating that counts as an approval
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
    /// Movies with fewer approvals are dropped
    #[arg(long, default_value_t = 20)]
    pub min_approvals: usize,
    /// Where to write the cache [default: --cache]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolverArgs {
    /// Exponent of the p-HUV rule: a nonnegative integer or "inf"
    #[arg(long)]
    pub p: Option<Exponent>,
    /// Committee size
    #[arg(long)]
    pub k: Option<usize>,
    /// TF-IDF balance constant (>= 1)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Annealing steps
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    /// Movie id, exact title, or unique title fragment; repeatable
    #[arg(long = "movie", required = true)]
    pub movies: Vec<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// exact (p = 0 only), greedy, or anneal; p = 0 always runs exact
    #[arg(long = "algo", default_value = "greedy")]
    pub algorithm: Algorithm,
    /// Print a table (the default unless --json)
    #[arg(long, conflicts_with = "json")]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 2000)]
    pub voters: usize,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Comma-separated exponents
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub p: Vec<Exponent>,
    /// Comma-separated solvers
    #[arg(long = "algos", value_delimiter = ',', default_value = "greedy,anneal")]
    pub algorithms: Vec<Algorithm>,
    /// Annealing steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Directory for histogram grids, the summary table and the plot
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Family member (id, title or fragment); repeatable
    #[arg(long = "movie", required_unless_present = "family")]
    pub movies: Vec<String>,
    /// Use every title containing this text as the family
    #[arg(long, conflicts_with = "movies")]
    pub family: Option<String>,
    /// Comma-separated gamma grid [default: 1.2,1.4,...,2.8]
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,
    /// Write the table here as tab-separated text
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Movie (id, title or fragment); repeatable
    #[arg(long = "movie", required = true)]
    pub movies: Vec<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub p: Vec<Exponent>,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    /// Write the embedding JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw the embedding as SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Number of sampled movies
    #[arg(long, default_value_t = 1000)]
    pub sample: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub p: Vec<Exponent>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Annealing steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Per-movie ratios as tab-separated text
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Swarm plot of the ratios as SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Shared, resolved state handed to every subcommand.
pub struct Context {
    pub config: RunConfig,
    pub json: bool,
}

fn flags_of(cli: &Cli) -> FlagConfig {
    let mut flags = FlagConfig {
        cache: cli.cache.clone(),
        seed: cli.seed,
        ..FlagConfig::default()
    };
    match &cli.command {
        Command::Query(q) => {
            flags.gamma = q.solver.gamma;
            flags.k = q.solver.k;
            flags.p = q.solver.p;
            flags.steps = q.solver.steps;
        }
        Command::Bench(b) => {
            flags.gamma = b.gamma;
            flags.k = b.k;
            flags.steps = b.steps;
        }
        Command::Embed(e) => {
            flags.gamma = e.gamma;
            flags.k = e.k;
        }
        Command::Synth(s) => flags.steps = s.steps,
        Command::Ingest(_) | Command::Calibrate(_) => {}
    }
    flags
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let ctx = Context {
        config: RunConfig::resolve(&flags_of(&cli), &file),
        json: cli.json,
    };
    match &cli.command {
        Command::Ingest(args) => commands::ingest(&ctx, args),
        Command::Query(args) => commands::query(&ctx, args),
        Command::Synth(args) => commands::synth(&ctx, args),
        Command::Calibrate(args) => commands::calibrate(&ctx, args),
        Command::Embed(args) => commands::embed(&ctx, args),
        Command::Bench(args) => commands::bench(&ctx, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn query_flags_feed_run_config() {
        let cli = Cli::try_parse_from(["votesearch", "--seed", "3", "query", "--movie", "x", "--p", "inf", "--k", "4"]).unwrap();
        let cfg = RunConfig::resolve(&flags_of(&cli), &FileConfig::default());
        assert_eq!(cfg.p, Exponent::Infinity);
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.annealing.seed, 3);
    }
}
