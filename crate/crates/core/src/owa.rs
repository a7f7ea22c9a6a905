//! Ordered weighted average operators and the harmonic utility voting family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights of an OWA operator, applied to a vector sorted in nonincreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct OwaVector {
    weights: Vec<f64>,
}

impl OwaVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "OWA weights must be finite and nonnegative, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The operator restricted to its first `len` weights.
    pub fn prefix(&self, len: usize) -> OwaVector {
        OwaVector {
            weights: self.weights[..len.min(self.weights.len())].to_vec(),
        }
    }

    /// `λ(x)`: the dot product of the weights with `x` sorted nonincreasingly.
    pub fn apply(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        let mut sorted = x.to_vec();
        Ok(self.apply_unsorted(&mut sorted))
    }

    /// Sorts `values` in place and applies the leading weights to them.
    /// `values` may be shorter than the operator; missing entries are zero.
    pub(crate) fn apply_unsorted(&self, values: &mut [f64]) -> f64 {
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        self.apply_sorted(values)
    }

    pub(crate) fn apply_sorted(&self, sorted_desc: &[f64]) -> f64 {
        sorted_desc
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }
}

/// Free function form of [`OwaVector::apply`].
pub fn owa_apply(lambda: &OwaVector, x: &[f64]) -> Result<f64> {
    lambda.apply(x)
}

/// The exponent `p` of a harmonic utility voting rule.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Exponent::ZERO
    }

    /// Weight of the `position`-th best utility (1-based).
    pub fn weight(self, position: usize) -> f64 {
        debug_assert!(position >= 1);
        match self {
            Exponent::Finite(0) => 1.0,
            Exponent::Finite(p) => {
                let p = i32::try_from(p).unwrap_or(i32::MAX);
                1.0 / (position as f64).powi(p)
            }
            Exponent::Infinity => {
                if position == 1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "cc" => Ok(Exponent::Infinity),
            other => other.parse::<u32>().map(Exponent::Finite).map_err(|_| {
                Error::InvalidParameter(format!(
                    "p must be a nonnegative integer or \"inf\", got {s:?}"
                ))
            }),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Ok(Exponent::Finite(p)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A p-HUV rule instance: exponent and committee size.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct HuvParams {
    pub p: Exponent,
    pub k: usize,
}

impl HuvParams {
    pub fn new(p: Exponent, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyCommittee);
        }
        Ok(Self { p, k })
    }

    pub fn weights(&self) -> OwaVector {
        huv_weights(*self)
    }
}

/// `(1, 1/2^p, 1/3^p, …)` truncated to `k`; `(1, 0, …, 0)` for `p = ∞`.
pub fn huv_weights(params: HuvParams) -> OwaVector {
    OwaVector {
        weights: (1..=params.k).map(|j| params.p.weight(j)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn owa(w: &[f64]) -> OwaVector {
        OwaVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn apply_max_and_sum() {
        assert_eq!(owa(&[1.0, 0.0, 0.0]).apply(&[1.0, 3.0, 2.0]).unwrap(), 3.0);
        assert_eq!(owa(&[1.0, 1.0, 1.0]).apply(&[1.0, 3.0, 2.0]).unwrap(), 6.0);
    }

    #[test]
    fn apply_harmonic_matches_sort_then_dot() {
        let lambda = owa(&[1.0, 0.5, 1.0 / 3.0]);
        let x = [0.0, 1.0, 1.0];
        // naive oracle: sort descending by hand, dot
        let oracle = 1.0 * 1.0 + 0.5 * 1.0 + (1.0 / 3.0) * 0.0;
        assert_eq!(oracle, 1.5);
        assert_eq!(lambda.apply(&x).unwrap(), oracle);
    }

    #[test]
    fn apply_length_mismatch() {
        assert!(matches!(
            owa(&[1.0, 1.0]).apply(&[1.0]),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn negative_weights_rejected() {
        assert!(OwaVector::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn huv_special_cases() {
        let w = |p, k| huv_weights(HuvParams::new(p, k).unwrap()).weights().to_vec();
        assert_eq!(w(Exponent::Finite(0), 3), vec![1.0, 1.0, 1.0]);
        assert_eq!(w(Exponent::Finite(1), 3), vec![1.0, 0.5, 1.0 / 3.0]);
        assert_eq!(w(Exponent::Infinity, 4), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(w(Exponent::Finite(2), 3), vec![1.0, 0.25, 1.0 / 9.0]);
    }

    #[test]
    fn zero_committee_rejected() {
        assert!(matches!(
            HuvParams::new(Exponent::ZERO, 0),
            Err(Error::EmptyCommittee)
        ));
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("3".parse::<Exponent>().unwrap(), Exponent::Finite(3));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("-1".parse::<Exponent>().is_err());
        assert_eq!(Exponent::Infinity.to_string(), "inf");
    }

    proptest! {
        #[test]
        fn apply_is_permutation_invariant(
            x in proptest::collection::vec(0.0f64..10.0, 1..8),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let lambda = huv_weights(HuvParams::new(Exponent::Finite(1), x.len()).unwrap());
            let mut y = x.clone();
            y.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(lambda.apply(&x).unwrap(), lambda.apply(&y).unwrap());
        }

        #[test]
        fn huv_weights_nonincreasing(p in 0u32..12, k in 1usize..30) {
            let w = huv_weights(HuvParams::new(Exponent::Finite(p), k).unwrap());
            prop_assert_eq!(w.weights()[0], 1.0);
            for pair in w.weights().windows(2) {
                if p == 0 {
                    prop_assert_eq!(pair[0], pair[1]);
                } else {
                    prop_assert!(pair[0] > pair[1]);
                }
            }
        }
    }
}
