use serde::{Deserialize, Serialize};

use crate::election::{ApprovalElection, ResourceId};
use crate::error::{Error, Result};
use crate::search::{derive_local_approval, Gamma};

/// `γ ∈ {1.2, 1.4, …, 2.8}`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..9).map(|i| f64::from(12 + 2 * i) / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub gamma: f64,
    /// Family members among each member's ten highest TF-IDF resources,
    /// aligned with `Calibration::family`.
    pub counts: Vec<usize>,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub family: Vec<ResourceId>,
    pub rows: Vec<CalibrationRow>,
    /// Members with an empty local election; they count 0.
    pub flagged: Vec<ResourceId>,
}

impl Calibration {
    /// The row with the highest mean; the smallest γ wins ties.
    pub fn best(&self) -> Option<&CalibrationRow> {
        self.rows
            .iter()
            .reduce(|best, row| if row.mean > best.mean { row } else { best })
    }
}

const TOP: usize = 10;

/// For each member of `family` used as a singleton query, counts the other
/// members among its top ten TF-IDF resources under each `γ`.
pub fn calibrate_gamma(global: &ApprovalElection, family: &[ResourceId], gammas: &[f64]) -> Result<Calibration> {
    let mut family = family.to_vec();
    family.sort_unstable();
    family.dedup();
    if family.len() < 2 {
        return Err(Error::InvalidParameter("calibration needs a family of at least two resources".into()));
    }
    let gammas = gammas.iter().map(|&g| Gamma::new(g)).collect::<Result<Vec<_>>>()?;

    let mut counts = vec![vec![0; family.len()]; gammas.len()];
    let mut flagged = Vec::new();
    for (member_idx, &x) in family.iter().enumerate() {
        let local = match derive_local_approval(global, &[x]) {
            Ok(local) if local.election.n_resources() > 0 => local,
            Ok(_) | Err(Error::NoSupporters) => {
                log::warn!("resource {x} has an empty local election; counted as 0");
                flagged.push(x);
                continue;
            }
            Err(e) => return Err(e),
        };
        let resources = local.election.resources();
        for (g, &gamma) in gammas.iter().enumerate() {
            let tfidf = local.tfidf(gamma);
            let mut order: Vec<usize> = (0..resources.len()).collect();
            order.sort_by(|&a, &b| tfidf[b].total_cmp(&tfidf[a]));
            counts[g][member_idx] = order
                .iter()
                .take(TOP)
                .filter(|&&pos| family.binary_search(&resources[pos]).is_ok())
                .count();
        }
    }

    let rows = gammas
        .iter()
        .zip(counts)
        .map(|(gamma, counts)| CalibrationRow {
            gamma: gamma.value(),
            mean: counts.iter().sum::<usize>() as f64 / family.len() as f64,
            counts,
        })
        .collect();
    Ok(Calibration { family, rows, flagged })
}
