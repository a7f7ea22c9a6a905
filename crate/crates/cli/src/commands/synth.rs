use std::path::Path;

use anyhow::Context as _;
use votesearch_core::synthetic::{run_histogram_experiment, ExperimentConfig, ExperimentOutcome, SyntheticConfig};
use votesearch_core::Gamma;

use crate::output::{json_string, table, write_text, write_tsv};
use crate::plot::{heatmaps, HeatPanel};
use crate::{Context, SynthArgs};

pub fn synth(ctx: &Context, args: &SynthArgs) -> anyhow::Result<()> {
    let seed = ctx.config.seed;
    super::announce_seed(seed);
    let cfg = ExperimentConfig {
        synthetic: SyntheticConfig {
            voters: args.voters,
            seed,
            ..SyntheticConfig::default()
        },
        trials: args.trials,
        k: args.k,
        gamma: Gamma::new(args.gamma)?,
        p_values: args.p.clone(),
        algorithms: args.algorithms.clone(),
        annealing: ctx.config.annealing,
        ..ExperimentConfig::default()
    };
    let outcome = run_histogram_experiment(&cfg)?;
    if outcome.regenerated > 0 {
        log::info!("{} elections regenerated", outcome.regenerated);
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        write_outputs(dir, &outcome)?;
    }
    if ctx.json {
        print!("{}", json_string(&outcome)?);
    } else {
        print!("{}", table(&["p", "algorithm", "x", "y", "z"], &summary_rows(&outcome)));
    }
    Ok(())
}

fn summary_rows(outcome: &ExperimentOutcome) -> Vec<Vec<String>> {
    outcome
        .runs
        .iter()
        .map(|run| {
            let s = run.histogram.summary();
            vec![
                run.p.to_string(),
                run.algorithm.to_string(),
                s.x.to_string(),
                s.y.to_string(),
                s.z.to_string(),
            ]
        })
        .collect()
}

/// `hist_p{p}_{algorithm}.tsv` per run (rows are categories, columns
/// subcategories), `summary.tsv`, and `histograms.svg`.
fn write_outputs(dir: &Path, outcome: &ExperimentOutcome) -> anyhow::Result<()> {
    for run in &outcome.runs {
        let counts = &run.histogram.counts;
        let subcategories = counts.first().map_or(0, Vec::len);
        let header: Vec<String> = std::iter::once("category".to_owned())
            .chain((1..=subcategories).map(|v| v.to_string()))
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = counts
            .iter()
            .enumerate()
            .map(|(u, row)| {
                std::iter::once((u + 1).to_string())
                    .chain(row.iter().map(u64::to_string))
                    .collect()
            })
            .collect();
        write_tsv(&dir.join(format!("hist_p{}_{}.tsv", run.p, run.algorithm)), &header, &rows)?;
    }
    write_tsv(&dir.join("summary.tsv"), &["p", "algorithm", "x", "y", "z"], &summary_rows(outcome))?;

    let panels: Vec<HeatPanel<'_>> = outcome
        .runs
        .iter()
        .map(|run| HeatPanel {
            title: format!("p={} {} {}", run.p, run.algorithm, run.histogram.summary()),
            counts: &run.histogram.counts,
            highlight: (run.histogram.query.category - 1, run.histogram.query.subcategory - 1),
        })
        .collect();
    let algorithms = outcome
        .runs
        .iter()
        .take_while(|r| r.p == outcome.runs[0].p)
        .count();
    write_text(&dir.join("histograms.svg"), &heatmaps(&panels, algorithms))
}
