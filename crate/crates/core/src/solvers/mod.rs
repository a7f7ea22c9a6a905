//! Winner determination for p-HUV rules.
//!
//! All solvers break ties deterministically and return committees whose
//! `score` is recomputed from scratch on the final members.

mod annealing;
mod bruteforce;
mod exact;
mod greedy;

pub use annealing::{solve_annealing, AnnealingConfig};
pub use bruteforce::{solve_bruteforce, solve_bruteforce_with_cap, DEFAULT_ENUMERATION_CAP};
pub use exact::solve_exact_p0;
pub use greedy::solve_greedy;

use crate::election::UtilityElection;
use crate::error::{Error, Result};

fn check_committee_size(e: &UtilityElection, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::EmptyCommittee);
    }
    if k > e.n_resources() {
        return Err(Error::CommitteeTooLarge {
            k,
            m: e.n_resources(),
        });
    }
    Ok(())
}
