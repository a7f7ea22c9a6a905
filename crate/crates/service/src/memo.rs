use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use rayon::prelude::*;
use votesearch_core::analysis::LocalRanks;
use votesearch_core::{ApprovalElection, Gamma, ResourceId, Result};

/// `None` marks a resource without supporters.
type Entry = Option<Arc<LocalRanks>>;

/// Bounded per-process memo of TF-IDF rank tables keyed by (resource, γ).
/// Each table costs one local-election build; a dissimilarity needs two.
pub struct RankMemo {
    cache: Mutex<LruCache<(ResourceId, u64), Entry>>,
}

impl RankMemo {
    pub fn new(capacity: NonZeroUsize) -> Self {
        Self {
            cache: Mutex::new(LruCache::new(capacity)),
        }
    }

    pub fn len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rank tables for `nodes`, in order. Misses are computed in parallel
    /// without holding the lock; concurrent misses on one key may compute
    /// it twice, with identical results.
    pub fn ranks(&self, global: &ApprovalElection, nodes: &[ResourceId], gamma: Gamma) -> Result<Vec<Entry>> {
        let key = |id: ResourceId| (id, gamma.value().to_bits());
        let mut found: Vec<Option<Entry>> = {
            let mut cache = self.cache.lock().unwrap();
            nodes.iter().map(|&id| cache.get(&key(id)).cloned()).collect()
        };
        let missing: Vec<usize> = (0..nodes.len()).filter(|&i| found[i].is_none()).collect();
        let computed: Vec<Entry> = missing
            .par_iter()
            .map(|&i| Ok(LocalRanks::compute(global, nodes[i], gamma)?.map(Arc::new)))
            .collect::<Result<_>>()?;
        let mut cache = self.cache.lock().unwrap();
        for (&i, entry) in missing.iter().zip(computed) {
            cache.put(key(nodes[i]), entry.clone());
            found[i] = Some(entry);
        }
        Ok(found.into_iter().map(Option::unwrap).collect())
    }
}
