use rayon::prelude::*;

use crate::election::{Algorithm, Committee, UtilityElection};
use crate::error::Result;
use crate::owa::{huv_weights, HuvParams};
use crate::scoring::{canonical_sum, insertion_gain, score_positions};

use super::check_committee_size;

/// Elections with fewer resources than this are scored sequentially.
const PARALLEL_THRESHOLD: usize = 4096;

/// Greedy p-HUV committee: `k` rounds, each adding the resource with the
/// largest marginal gain (ties to the lowest id). Members are returned in
/// the order they were added.
pub fn solve_greedy(e: &UtilityElection, params: HuvParams) -> Result<Committee> {
    check_committee_size(e, params.k)?;
    let lambda = huv_weights(params);
    let m = e.n_resources();
    let mut chosen = vec![false; m];
    // per agent: utilities of the members selected so far, nonincreasing
    let mut held: Vec<Vec<f64>> = vec![Vec::new(); e.n_agents()];
    let mut members = Vec::with_capacity(params.k);

    for round in 0..params.k {
        let weights = &lambda.weights()[..=round];
        let gain_of = |pos: usize| -> f64 {
            if chosen[pos] {
                return f64::NEG_INFINITY;
            }
            let mut gains: Vec<f64> = e
                .column(pos)
                .iter()
                .map(|&(agent, u)| insertion_gain(&held[agent as usize], u, weights))
                .collect();
            canonical_sum(&mut gains)
        };
        let gains: Vec<f64> = if m >= PARALLEL_THRESHOLD {
            (0..m).into_par_iter().map(gain_of).collect()
        } else {
            (0..m).map(gain_of).collect()
        };

        let mut best = None;
        for (pos, &gain) in gains.iter().enumerate() {
            if chosen[pos] {
                continue;
            }
            match best {
                Some((_, g)) if gain <= g => {}
                _ => best = Some((pos, gain)),
            }
        }
        let (best, _) = best.expect("k <= m leaves a candidate in every round");
        chosen[best] = true;
        members.push(best);
        for &(agent, u) in e.column(best) {
            let list = &mut held[agent as usize];
            let at = list.partition_point(|&v| v >= u);
            list.insert(at, u);
        }
    }

    Ok(Committee {
        members: members.iter().map(|&pos| e.resources()[pos]).collect(),
        score: score_positions(e, &lambda, &members),
        algorithm: Algorithm::Greedy,
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

    fn three_two() -> UtilityElection {
        let mut ballots = vec![vec![r(0), r(1)]; 3];
        ballots.extend(vec![vec![r(2)]; 2]);
        UtilityElection::from_approval(&ApprovalElection::new([r(0), r(1), r(2)], ballots).unwrap())
    }

    #[test]
    fn pav_picks_a_then_c() {
        let c = solve_greedy(&three_two(), HuvParams::new(Exponent::Finite(1), 2).unwrap()).unwrap();
        assert_eq!(c.members, vec![r(0), r(2)]);
        assert_eq!(c.score, 5.0);
        assert_eq!(c.iteration(0), Some(1));
    }

    #[test]
    fn av_picks_a_then_b() {
        let c = solve_greedy(&three_two(), HuvParams::new(Exponent::ZERO, 2).unwrap()).unwrap();
        assert_eq!(c.members, vec![r(0), r(1)]);
        assert_eq!(c.score, 6.0);
    }

    #[test]
    fn single_member_is_max_total() {
        let e = UtilityElection::new(
            [r(1), r(2), r(3)],
            vec![vec![(r(1), 1.0), (r(3), 2.5)], vec![(r(1), 1.0), (r(2), 0.5)]],
        )
        .unwrap();
        for p in [Exponent::ZERO, Exponent::Finite(2), Exponent::Infinity] {
            let c = solve_greedy(&e, HuvParams::new(p, 1).unwrap()).unwrap();
            assert_eq!(c.members, vec![r(3)]);
        }
    }

    #[test]
    fn unsupported_resources_fill_up_by_id() {
        let e = UtilityElection::new([r(5), r(1), r(9)], vec![vec![(r(9), 1.0)]]).unwrap();
        let c = solve_greedy(&e, HuvParams::new(Exponent::Finite(1), 3).unwrap()).unwrap();
        assert_eq!(c.members, vec![r(9), r(1), r(5)]);
    }
}
