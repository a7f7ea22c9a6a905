//! λ-scores of committees and their incremental form.
//!
//! Sums over agents are taken in a canonical order (ascending by value), so
//! scores do not depend on how agents happen to be numbered.

use crate::election::{ResourceId, UtilityElection};
use crate::error::{Error, Result};
use crate::owa::OwaVector;

/// The sum of finite `values`, correctly rounded; hence independent of
/// input order. Keeps nonoverlapping partial sums (Shewchuk) and rounds them
/// half-to-even at the end.
pub(crate) fn canonical_sum(values: &mut [f64]) -> f64 {
    exact_sum(values.iter().copied())
}

pub(crate) fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }

    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // a halfway case the last addition rounded the wrong way
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Resolves committee members to positions, rejecting unknown and repeated ids.
pub(crate) fn member_positions(e: &UtilityElection, s: &[ResourceId]) -> Result<Vec<usize>> {
    let mut positions = Vec::with_capacity(s.len());
    for &r in s {
        let pos = e.position(r).ok_or(Error::UnknownResource(r))?;
        if positions.contains(&pos) {
            return Err(Error::DuplicateMember(r));
        }
        positions.push(pos);
    }
    Ok(positions)
}

/// `λ-score_E(S) = Σ_i λ(u_i(S))`.
pub fn score_committee(e: &UtilityElection, lambda: &OwaVector, s: &[ResourceId]) -> Result<f64> {
    if s.len() != lambda.len() {
        return Err(Error::LengthMismatch {
            expected: lambda.len(),
            actual: s.len(),
        });
    }
    let positions = member_positions(e, s)?;
    Ok(score_positions(e, lambda, &positions))
}

/// Score of the committee at `positions`; only agents with a positive
/// utility for some member are visited.
pub(crate) fn score_positions(e: &UtilityElection, lambda: &OwaVector, positions: &[usize]) -> f64 {
    let mut entries: Vec<(u32, f64)> = positions
        .iter()
        .flat_map(|&pos| e.column(pos).iter().copied())
        .collect();
    entries.sort_unstable_by_key(|&(agent, _)| agent);
    let mut per_agent = Vec::new();
    let mut values = Vec::with_capacity(positions.len());
    for group in entries.chunk_by(|a, b| a.0 == b.0) {
        values.clear();
        values.extend(group.iter().map(|&(_, u)| u));
        per_agent.push(lambda.apply_unsorted(&mut values));
    }
    canonical_sum(&mut per_agent)
}

/// Gain of one agent when a utility `u` joins their committee utilities
/// `current` (sorted nonincreasingly). `weights` must be at least one longer
/// than `current`.
pub(crate) fn insertion_gain(current: &[f64], u: f64, weights: &[f64]) -> f64 {
    let at = current.partition_point(|&v| v >= u);
    let mut gain = weights[at] * u;
    for t in at..current.len() {
        gain += (weights[t + 1] - weights[t]) * current[t];
    }
    gain.max(0.0)
}

/// Score increase from adding `r` to the partial committee `s`, where the
/// partial scores use the first `|s|` and `|s| + 1` weights of `lambda`.
pub fn marginal_gain(
    e: &UtilityElection,
    lambda: &OwaVector,
    s: &[ResourceId],
    r: ResourceId,
) -> Result<f64> {
    if s.contains(&r) {
        return Err(Error::AlreadySelected(r));
    }
    if s.len() >= lambda.len() {
        return Err(Error::CommitteeTooLarge {
            k: s.len() + 1,
            m: lambda.len(),
        });
    }
    let positions = member_positions(e, s)?;
    let r_pos = e.position(r).ok_or(Error::UnknownResource(r))?;
    let weights = &lambda.weights()[..=s.len()];
    let mut current = Vec::with_capacity(s.len());
    let mut gains: Vec<f64> = e
        .column(r_pos)
        .iter()
        .map(|&(agent, u)| {
            current.clear();
            current.extend(
                positions
                    .iter()
                    .map(|&pos| e.utility_at(agent as usize, pos))
                    .filter(|&v| v > 0.0),
            );
            current.sort_unstable_by(|a, b| b.total_cmp(a));
            insertion_gain(&current, u, weights)
        })
        .collect();
    Ok(canonical_sum(&mut gains))
}
