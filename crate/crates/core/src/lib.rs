//! Voting-based search with a tunable focus/breadth trade-off.
//!
//! A global approval election (who liked what) is restricted to the agents
//! that approve a query, re-weighted with a TF-IDF heuristic into a local
//! utility election, and the winning committee of a p-HUV rule over that
//! election is the search result. `p = 0` returns the most closely related
//! resources; larger `p` spreads the committee over more agents' tastes.

pub mod analysis;
pub mod cache;
pub mod catalog;
pub mod election;
pub mod error;
pub mod ingest;
pub mod owa;
pub mod scoring;
pub mod search;
pub mod seed;
pub mod solvers;
pub mod synthetic;

pub use election::{Algorithm, ApprovalElection, Committee, ResourceId, UtilityElection};
pub use error::{Error, Result};
pub use owa::{huv_weights, owa_apply, Exponent, HuvParams, OwaVector};
pub use scoring::{marginal_gain, score_committee};
pub use solvers::{
    solve_annealing, solve_bruteforce, solve_exact_p0, solve_greedy, AnnealingConfig,
};
pub use cache::GlobalData;
pub use catalog::{Catalog, CatalogEntry, Resolution};
pub use ingest::{build_global_election, load_movielens, IngestConfig, IngestReport};
pub use search::{
    derive_local_approval, derive_local_utility, search, Gamma, LocalApproval, LocalElection,
    Query, SearchResult,
};
