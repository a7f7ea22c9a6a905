//! Fruchterman–Reingold spring layout over a complete weighted graph.
//!
//! Every pair repels with `k² / d` and attracts with `w · d² / k`, where
//! `k = sqrt(1 / n)`. Each iteration moves every node a distance `t` along
//! its net force; `t` starts at a tenth of the initial extent and cools
//! linearly to zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::election::ResourceId;
use crate::error::{Error, Result};

use super::dissimilarity::DissimilarityGraph;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LayoutConfig {
    pub iterations: usize,
    pub seed: u64,
    /// Stop once the mean node displacement of an iteration falls below this.
    pub threshold: f64,
    /// Rescale the result into the unit square, preserving aspect ratio.
    pub normalize: bool,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            seed: 0,
            threshold: 1e-4,
            normalize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub nodes: Vec<ResourceId>,
    pub positions: Vec<[f64; 2]>,
}

impl Embedding {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn position_of(&self, id: ResourceId) -> Option<[f64; 2]> {
        let i = self.nodes.iter().position(|&n| n == id)?;
        Some(self.positions[i])
    }
}

const MIN_DISTANCE: f64 = 0.01;

/// Lays out `n` nodes; `weight(i, j)` must be symmetric and nonnegative.
pub fn spring_layout(n: usize, weight: impl Fn(usize, usize) -> f64, cfg: &LayoutConfig) -> Vec<[f64; 2]> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![[0.0, 0.0]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    let weights: Vec<f64> = (0..n * n).map(|ij| weight(ij / n, ij % n)).collect();

    let k = (1.0 / n as f64).sqrt();
    let extent = |axis: usize| {
        let (lo, hi) = pos
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[axis]), hi.max(p[axis])));
        hi - lo
    };
    let mut t = extent(0).max(extent(1)) * 0.1;
    let dt = t / (cfg.iterations as f64 + 1.0);

    let mut step = vec![[0.0; 2]; n];
    for _ in 0..cfg.iterations {
        for i in 0..n {
            let mut disp = [0.0, 0.0];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let delta = [pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]];
                let d = delta[0].hypot(delta[1]).max(MIN_DISTANCE);
                let force = k * k / (d * d) - weights[i * n + j] * d / k;
                disp[0] += delta[0] * force;
                disp[1] += delta[1] * force;
            }
            let length = disp[0].hypot(disp[1]);
            let length = if length < MIN_DISTANCE { 0.1 } else { length };
            step[i] = [disp[0] * t / length, disp[1] * t / length];
        }
        let mut moved = 0.0;
        for (p, s) in pos.iter_mut().zip(&step) {
            p[0] += s[0];
            p[1] += s[1];
            moved += s[0] * s[0] + s[1] * s[1];
        }
        t -= dt;
        if moved.sqrt() / (n as f64) < cfg.threshold {
            break;
        }
    }

    if cfg.normalize {
        normalize_unit_square(&mut pos);
    }
    pos
}

fn normalize_unit_square(pos: &mut [[f64; 2]]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pos.iter() {
        for axis in 0..2 {
            lo[axis] = lo[axis].min(p[axis]);
            hi[axis] = hi[axis].max(p[axis]);
        }
    }
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    for p in pos.iter_mut() {
        for axis in 0..2 {
            p[axis] = (p[axis] - lo[axis]) / scale;
        }
    }
}

/// Embeds the graph with edge weights `diss^-2`; missing pairs do not attract.
pub fn embed(graph: &DissimilarityGraph, cfg: &LayoutConfig) -> Result<Embedding> {
    if graph.is_empty() {
        return Err(Error::InvalidParameter("cannot embed an empty graph".into()));
    }
    let positions = spring_layout(graph.len(), |i, j| if i == j { 0.0 } else { graph.weight(i, j) }, cfg);
    Ok(Embedding {
        nodes: graph.nodes().to_vec(),
        positions,
    })
}

/// Mean silhouette coefficient of `labels` under the distance `dist(i, j)`.
/// Members of singleton clusters score 0. `None` with fewer than two clusters.
pub fn silhouette_score(n: usize, dist: impl Fn(usize, usize) -> f64, labels: &[usize]) -> Option<f64> {
    let clusters = labels.iter().max().map_or(0, |&m| m + 1);
    let sizes: Vec<usize> = (0..clusters)
        .map(|c| labels.iter().filter(|&&l| l == c).count())
        .collect();
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return None;
    }
    let total: f64 = (0..n)
        .map(|i| {
            let own = labels[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; clusters];
            for j in (0..n).filter(|&j| j != i) {
                sums[labels[j]] += dist(i, j);
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..clusters)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            if a.max(b) == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .sum();
    Some(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(iterations: usize, seed: u64) -> LayoutConfig {
        LayoutConfig {
            iterations,
            seed,
            threshold: 0.0,
            normalize: false,
        }
    }

    #[test]
    fn two_body_equilibrium() {
        // repulsion k²/d balances attraction w·d²/k at d = k · w^(-1/3)
        let k = 0.5f64.sqrt();
        for diss in [1.0f64, 2.0, 4.0] {
            let w = diss.powi(-2);
            let pos = spring_layout(2, |i, j| if i == j { 0.0 } else { w }, &raw(2000, 3));
            let d = (pos[0][0] - pos[1][0]).hypot(pos[0][1] - pos[1][1]);
            let expected = k * w.powf(-1.0 / 3.0);
            assert!((d - expected).abs() < 0.01 * expected, "diss {diss}: {d} vs {expected}");
        }
    }

    #[test]
    fn deterministic_and_normalized() {
        let graph = DissimilarityGraph::from_fn((0..6).map(ResourceId).collect(), |i, j| {
            Some(1.0 + ((i / 3) != (j / 3)) as u8 as f64 * 9.0)
        });
        let cfg = LayoutConfig {
            iterations: 500,
            ..LayoutConfig::default()
        };
        let a = embed(&graph, &cfg).unwrap();
        assert_eq!(a, embed(&graph, &cfg).unwrap());
        for p in &a.positions {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
        let labels = [0, 0, 0, 1, 1, 1];
        assert!(silhouette_score(6, |i, j| a.distance(i, j), &labels).unwrap() > 0.5);
    }

    #[test]
    fn single_node_at_origin() {
        let graph = DissimilarityGraph::from_fn(vec![ResourceId(1)], |_, _| None);
        let e = embed(&graph, &LayoutConfig::default()).unwrap();
        assert_eq!(e.positions, vec![[0.0, 0.0]]);
    }

    #[test]
    fn silhouette_by_hand() {
        // points 0, 1 and 10, 11 on a line
        let x = [0.0f64, 1.0, 10.0, 11.0];
        let s = silhouette_score(4, |i, j| (x[i] - x[j]).abs(), &[0, 0, 1, 1]).unwrap();
        let s0 = (10.5 - 1.0) / 10.5;
        let s1 = (9.5 - 1.0) / 9.5;
        assert!((s - (s0 + s1) / 2.0).abs() < 1e-12);
        assert_eq!(silhouette_score(2, |_, _| 1.0, &[0, 0]), None);
    }
}
