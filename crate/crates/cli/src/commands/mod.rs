mod analysis;
mod ingest;
mod query;
mod synth;

pub use analysis::{bench, calibrate, embed};
pub use ingest::ingest;
pub use query::query;
pub use synth::synth;

use anyhow::{anyhow, Context as _};
use votesearch_core::{cache, Catalog, GlobalData, Resolution, ResourceId};

use crate::Context;

pub(crate) fn load_global(ctx: &Context) -> anyhow::Result<GlobalData> {
    let path = &ctx.config.cache_path;
    log::info!("loading {}", path.display());
    cache::load(path).with_context(|| format!("cannot load cache {} (run `votesearch ingest` first)", path.display()))
}

/// Resolves each text to a resource; the first failure names up to five
/// candidate titles.
pub(crate) fn resolve_all(catalog: &Catalog, texts: &[String]) -> anyhow::Result<Vec<ResourceId>> {
    texts
        .iter()
        .map(|text| match catalog.resolve(text) {
            Resolution::Found(id) => Ok(id),
            Resolution::NotFound { suggestions } if suggestions.is_empty() => {
                Err(anyhow!("no movie matches {text:?}"))
            }
            Resolution::NotFound { suggestions } => {
                let titles: Vec<String> = suggestions
                    .iter()
                    .map(|&id| format!("{} [{id}]", catalog.title(id)))
                    .collect();
                Err(anyhow!("no unique movie matches {text:?}; did you mean: {}", titles.join("; ")))
            }
        })
        .collect()
}

pub(crate) fn announce_seed(seed: u64) {
    eprintln!("seed: {seed}");
}
