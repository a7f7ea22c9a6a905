use anyhow::Context as _;
use votesearch_core::synthetic::{generate_election, SyntheticConfig};
use votesearch_core::{build_global_election, cache, ingest as core_ingest, GlobalData, IngestConfig, IngestReport};

use crate::output::{json_string, table};
use crate::{Context, IngestArgs};

pub fn ingest(ctx: &Context, args: &IngestArgs) -> anyhow::Result<()> {
    let cfg = IngestConfig {
        approval_threshold: args.threshold,
        min_approvals: args.min_approvals,
    };
    let out = args.out.as_ref().unwrap_or(&ctx.config.cache_path);
    let (data, report) = if args.synthetic {
        super::announce_seed(ctx.config.seed);
        let synthetic = SyntheticConfig {
            voters: args.voters,
            seed: ctx.config.seed,
            ..SyntheticConfig::default()
        };
        let generated = generate_election(&synthetic)?;
        let report = IngestReport {
            users: generated.election.n_agents(),
            movies_rated: generated.election.n_resources(),
            movies_kept: generated.election.n_resources(),
            approvals_kept: generated.election.total_approvals(),
            ..IngestReport::default()
        };
        let data = GlobalData {
            election: generated.election,
            catalog: generated.catalog,
            ingest: cfg,
        };
        (data, report)
    } else if let Some(dir) = &args.dir {
        votesearch_core::load_movielens(dir, cfg)?
    } else if let (Some(ratings), Some(movies)) = (&args.ratings, &args.movies) {
        let (election, report) = build_global_election(core_ingest::read_ratings_file(ratings)?, cfg)?;
        let mut catalog = core_ingest::read_catalog_file(movies)?;
        let placeholders = catalog.restrict_to(&election);
        if placeholders > 0 {
            log::warn!("{placeholders} rated movies are missing from {}", movies.display());
        }
        (
            GlobalData {
                election,
                catalog,
                ingest: cfg,
            },
            report,
        )
    } else {
        anyhow::bail!("ingest needs --dir, --ratings with --movies, or --synthetic");
    };
    cache::save(&data, out).with_context(|| format!("cannot write cache {}", out.display()))?;

    if ctx.json {
        #[derive(serde::Serialize)]
        struct Summary<'a> {
            cache: &'a std::path::Path,
            ratings: u64,
            users: usize,
            duplicates: u64,
            movies_rated: usize,
            movies_kept: usize,
            approvals: usize,
        }
        print!(
            "{}",
            json_string(&Summary {
                cache: out,
                ratings: report.ratings,
                users: report.users,
                duplicates: report.duplicates,
                movies_rated: report.movies_rated,
                movies_kept: report.movies_kept,
                approvals: report.approvals_kept,
            })?
        );
    } else {
        let rows = vec![
            vec!["ratings read".into(), report.ratings.to_string()],
            vec!["duplicate ratings".into(), report.duplicates.to_string()],
            vec!["agents".into(), report.users.to_string()],
            vec!["movies rated".into(), report.movies_rated.to_string()],
            vec!["movies kept".into(), report.movies_kept.to_string()],
            vec!["approvals kept".into(), report.approvals_kept.to_string()],
        ];
        print!("{}", table(&["", "count"], &rows));
        println!("wrote {}", out.display());
    }
    Ok(())
}
