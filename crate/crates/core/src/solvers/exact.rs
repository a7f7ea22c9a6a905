use crate::election::{Algorithm, Committee, UtilityElection};
use crate::error::Result;
use crate::owa::{huv_weights, Exponent, HuvParams};
use crate::scoring::score_positions;

use super::check_committee_size;

/// Positions sorted by total utility, highest first, ties by ascending id.
pub(crate) fn rank_by_total(e: &UtilityElection) -> Vec<usize> {
    let totals: Vec<f64> = (0..e.n_resources())
        .map(|pos| e.total_utility_at(pos))
        .collect();
    let mut order: Vec<usize> = (0..e.n_resources()).collect();
    // positions are in id order, so a stable sort keeps the id tie-break
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]));
    order
}

/// The 0-HUV (multiwinner approval voting) winner: the `k` resources with
/// the largest total utility, highest first.
pub fn solve_exact_p0(e: &UtilityElection, k: usize) -> Result<Committee> {
    check_committee_size(e, k)?;
    let mut order = rank_by_total(e);
    order.truncate(k);
    let lambda = huv_weights(HuvParams::new(Exponent::ZERO, k)?);
    Ok(Committee {
        members: order.iter().map(|&pos| e.resources()[pos]).collect(),
        score: score_positions(e, &lambda, &order),
        algorithm: Algorithm::Exact,
        seed: None,
    })
}
