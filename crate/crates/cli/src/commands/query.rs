use votesearch_core::{search, Algorithm, Gamma, Query};

use crate::output::{json_string, num, table};
use crate::{Context, QueryArgs};

pub fn query(ctx: &Context, args: &QueryArgs) -> anyhow::Result<()> {
    let global = super::load_global(ctx)?;
    let resources = super::resolve_all(&global.catalog, &args.movies)?;
    let cfg = &ctx.config;
    let q = Query {
        resources,
        gamma: Gamma::new(cfg.gamma)?,
        p: cfg.p,
        k: cfg.k,
        algorithm: args.algorithm,
        annealing: cfg.annealing,
    };
    if q.effective_algorithm() == Algorithm::Annealing {
        super::announce_seed(cfg.seed);
    }
    let result = search(&global.election, &global.catalog, &q)?;
    if result.truncated {
        log::warn!("only {} related movies; returning all of them", result.members.len());
    }
    if ctx.json && !args.table {
        print!("{}", json_string(&result)?);
        return Ok(());
    }
    let rows: Vec<Vec<String>> = result
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                (i + 1).to_string(),
                m.id.to_string(),
                m.title.clone(),
                num(m.tfidf),
                m.local_approvals.to_string(),
                m.global_approvals.to_string(),
            ]
        })
        .collect();
    print!("{}", table(&["#", "id", "title", "tfidf", "local", "global"], &rows));
    println!("p={} k={} algorithm={} score={}", result.p, result.k, result.algorithm, num(result.score));
    Ok(())
}
