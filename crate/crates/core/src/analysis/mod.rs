//! Measurements over a global election: TF-IDF rank dissimilarity,
//! extension sets, 2-D embeddings, γ calibration and solver benchmarks.

mod bench;
mod calibrate;
mod dissimilarity;
mod embedding;

pub use bench::{bench_algorithms, BenchConfig, BenchOutcome, BenchRow, BenchSummary};
pub use calibrate::{calibrate_gamma, default_gamma_grid, Calibration, CalibrationRow};
pub use dissimilarity::{
    build_extension, dissimilarity, rank_in_local, DissimilarityGraph, Extension, ExtensionCommittee,
    LocalRanks,
};
pub use embedding::{embed, silhouette_score, spring_layout, Embedding, LayoutConfig};
