#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use votesearch_core::{ApprovalElection, ResourceId, UtilityElection};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` resources with ids 0..m; about 40% of the entries are nonzero.
// the utility is drawn only for kept entries, so the stream order matters
#[allow(clippy::filter_map_bool_then)]
pub fn random_utility(rng: &mut ChaCha8Rng, n: usize, m: usize) -> UtilityElection {
    let ballots = (0..n)
        .map(|_| {
            (0..m as u32)
                .filter_map(|r| rng.random_bool(0.4).then(|| (ResourceId(r), rng.random_range(0.0..=5.0))))
                .collect()
        })
        .collect();
    UtilityElection::new((0..m as u32).map(ResourceId), ballots).unwrap()
}

pub fn random_approval(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> ApprovalElection {
    let ballots = (0..n)
        .map(|_| (0..m as u32).filter(|_| rng.random_bool(density)).map(ResourceId).collect())
        .collect();
    ApprovalElection::new((0..m as u32).map(ResourceId), ballots).unwrap()
}

/// Every k-subset of 0..m, lexicographically.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<ResourceId>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<ResourceId>, out: &mut Vec<Vec<ResourceId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for r in start..m {
            cur.push(ResourceId(r as u32));
            go(r + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}
