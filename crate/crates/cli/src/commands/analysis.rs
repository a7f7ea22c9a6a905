use serde::Serialize;
use votesearch_core::analysis::{
    bench_algorithms, build_extension, calibrate_gamma, default_gamma_grid, embed as layout, BenchConfig,
    DissimilarityGraph, ExtensionCommittee, LayoutConfig,
};
use votesearch_core::{Gamma, ResourceId};

use crate::output::{json_string, num, table, write_json, write_text, write_tsv};
use crate::plot::{scatter, swarm, Point};
use crate::{BenchArgs, CalibrateArgs, Context, EmbedArgs};

pub fn calibrate(ctx: &Context, args: &CalibrateArgs) -> anyhow::Result<()> {
    let global = super::load_global(ctx)?;
    let family = match &args.family {
        Some(needle) => global.catalog.search(needle),
        None => super::resolve_all(&global.catalog, &args.movies)?,
    };
    let gammas = if args.gammas.is_empty() {
        default_gamma_grid()
    } else {
        args.gammas.clone()
    };
    let cal = calibrate_gamma(&global.election, &family, &gammas)?;
    for &id in &cal.flagged {
        eprintln!("warning: {} has an empty local election", global.catalog.title(id));
    }
    if ctx.json {
        print!("{}", json_string(&cal)?);
    } else {
        let titles: Vec<String> = cal.family.iter().map(|&id| global.catalog.title(id)).collect();
        let mut header = vec!["gamma"];
        header.extend(titles.iter().map(String::as_str));
        header.push("mean");
        let rows: Vec<Vec<String>> = cal
            .rows
            .iter()
            .map(|row| {
                std::iter::once(format!("{:.2}", row.gamma))
                    .chain(row.counts.iter().map(usize::to_string))
                    .chain(std::iter::once(format!("{:.3}", row.mean)))
                    .collect()
            })
            .collect();
        if let Some(path) = &args.out {
            write_tsv(path, &header, &rows)?;
        }
        print!("{}", table(&header, &rows));
        if let Some(best) = cal.best() {
            println!("best gamma: {:.2} (mean {:.3})", best.gamma, best.mean);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EmbedNode {
    id: ResourceId,
    title: String,
    genre: Option<String>,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct EmbedFile {
    seed: u64,
    query: Vec<ResourceId>,
    nodes: Vec<EmbedNode>,
    committees: Vec<ExtensionCommittee>,
}

pub fn embed(ctx: &Context, args: &EmbedArgs) -> anyhow::Result<()> {
    let global = super::load_global(ctx)?;
    let query = super::resolve_all(&global.catalog, &args.movies)?;
    let seed = ctx.config.seed;
    super::announce_seed(seed);
    let gamma = Gamma::new(ctx.config.gamma)?;
    let ext = build_extension(&global.election, &query, ctx.config.k, &args.p, gamma)?;
    eprintln!("extension: {} movies", ext.members.len());
    let graph = DissimilarityGraph::build(&global.election, &ext.members, gamma)?;
    let cfg = LayoutConfig {
        iterations: args.iterations,
        seed,
        ..LayoutConfig::default()
    };
    let embedding = layout(&graph, &cfg)?;
    let nodes: Vec<EmbedNode> = embedding
        .nodes
        .iter()
        .zip(&embedding.positions)
        .map(|(&id, pos)| {
            let entry = global.catalog.get(id);
            EmbedNode {
                id,
                title: global.catalog.title(id),
                genre: entry.and_then(|e| e.first_genre()).map(str::to_owned),
                x: pos[0],
                y: pos[1],
            }
        })
        .collect();
    if let Some(path) = &args.svg {
        let ringed: std::collections::BTreeSet<ResourceId> = ext.b.iter().copied().collect();
        let points: Vec<Point> = nodes
            .iter()
            .map(|n| Point {
                x: n.x,
                y: n.y,
                label: n.title.clone(),
                group: n.genre.clone().unwrap_or_else(|| "(none)".into()),
                ringed: ringed.contains(&n.id),
            })
            .collect();
        let titles: Vec<String> = query.iter().map(|&id| global.catalog.title(id)).collect();
        write_text(path, &scatter(&points, &titles.join(", ")))?;
    }
    let file = EmbedFile {
        seed,
        query,
        nodes,
        committees: ext.committees,
    };
    write_json(args.out.as_deref(), &file)
}

pub fn bench(ctx: &Context, args: &BenchArgs) -> anyhow::Result<()> {
    let global = super::load_global(ctx)?;
    let seed = ctx.config.seed;
    super::announce_seed(seed);
    let cfg = BenchConfig {
        sample_size: args.sample,
        p_values: args.p.clone(),
        k: ctx.config.k,
        seed,
        gamma: Gamma::new(ctx.config.gamma)?,
        annealing: ctx.config.annealing,
    };
    let outcome = bench_algorithms(&global.election, &cfg)?;
    if let Some(path) = &args.out {
        let mut header = vec!["id".to_owned(), "global_approvals".into(), "local_resources".into()];
        header.extend(cfg.p_values.iter().map(|p| format!("ratio_p{p}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = outcome
            .rows
            .iter()
            .map(|r| {
                [r.id.to_string(), r.global_approvals.to_string(), r.local_resources.to_string()]
                    .into_iter()
                    .chain(r.ratios.iter().map(|&x| format!("{x:.9}")))
                    .collect()
            })
            .collect();
        write_tsv(path, &header, &rows)?;
    }
    if let Some(path) = &args.svg {
        let series: Vec<(String, Vec<f64>)> = cfg
            .p_values
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("p={p}"), outcome.rows.iter().map(|r| r.ratios[i]).collect()))
            .collect();
        write_text(path, &swarm(&series, "greedy / annealing"))?;
    }
    if ctx.json {
        print!("{}", json_string(&outcome)?);
    } else {
        let rows: Vec<Vec<String>> = outcome
            .summary
            .iter()
            .map(|s| vec![s.p.to_string(), s.count.to_string(), num(s.mean), num(s.std)])
            .collect();
        print!("{}", table(&["p", "movies", "mean", "std"], &rows));
        if !outcome.skipped.is_empty() {
            println!("skipped {} movies with a degenerate local election", outcome.skipped.len());
        }
    }
    Ok(())
}
