use crate::election::{Algorithm, Committee, UtilityElection};
use crate::error::{Error, Result};
use crate::owa::{huv_weights, HuvParams};
use crate::scoring::score_positions;

use super::check_committee_size;

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

fn binomial(m: usize, k: usize) -> u128 {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Optimal committee by exhaustive enumeration. Ties go to the
/// lexicographically smallest sorted id list.
pub fn solve_bruteforce(e: &UtilityElection, params: HuvParams) -> Result<Committee> {
    solve_bruteforce_with_cap(e, params, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_bruteforce_with_cap(
    e: &UtilityElection,
    params: HuvParams,
    cap: u128,
) -> Result<Committee> {
    let (m, k) = (e.n_resources(), params.k);
    check_committee_size(e, k)?;
    let count = binomial(m, k);
    if count > cap {
        return Err(Error::EnumerationCap { m, k, count, cap });
    }
    let lambda = huv_weights(params);
    let mut subset: Vec<usize> = (0..k).collect();
    let mut best = subset.clone();
    let mut best_score = score_positions(e, &lambda, &subset);
    // lexicographic successor of a k-combination of 0..m
    while let Some(i) = (0..k).rev().find(|&i| subset[i] < m - k + i) {
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
        let score = score_positions(e, &lambda, &subset);
        if score > best_score {
            best_score = score;
            best.clone_from(&subset);
        }
    }
    Ok(Committee {
        members: best.iter().map(|&pos| e.resources()[pos]).collect(),
        score: best_score,
        algorithm: Algorithm::BruteForce,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{ApprovalElection, ResourceId};
    use crate::owa::Exponent;

    fn r(id: u32) -> ResourceId {
        ResourceId(id)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(5, 5), 1);
        assert!(binomial(60_000, 10) > DEFAULT_ENUMERATION_CAP);
    }

    #[test]
    fn full_set_when_k_equals_m() {
        let e = UtilityElection::new([r(1), r(2), r(3)], vec![vec![(r(2), 1.0)]]).unwrap();
        let c = solve_bruteforce(&e, HuvParams::new(Exponent::Finite(1), 3).unwrap()).unwrap();
        assert_eq!(c.members, vec![r(1), r(2), r(3)]);
        assert_eq!(c.score, 1.0);
    }

    #[test]
    fn pav_three_two_example() {
        let mut ballots = vec![vec![r(0), r(1)]; 3];
        ballots.extend(vec![vec![r(2)]; 2]);
        let e = UtilityElection::from_approval(
            &ApprovalElection::new([r(0), r(1), r(2)], ballots).unwrap(),
        );
        let c = solve_bruteforce(&e, HuvParams::new(Exponent::Finite(1), 2).unwrap()).unwrap();
        // {a,c} and {b,c} both score 5; lexicographic tie-break
        assert_eq!(c.members, vec![r(0), r(2)]);
        assert_eq!(c.score, 5.0);
    }

    #[test]
    fn cap_is_enforced() {
        let e = UtilityElection::new((0..30).map(ResourceId), vec![]).unwrap();
        let err = solve_bruteforce_with_cap(&e, HuvParams::new(Exponent::ZERO, 10).unwrap(), 1000)
            .unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { count: 30045015, .. }));
        assert!(err.to_string().contains("greedy or annealing"));
    }
}
