//! Return times of a torus rotation to an `ε`-neighbourhood of the identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intcore::TorusPoint;

/// `{j ∈ [0, horizon] : ‖(1,…,1) − θ^j‖∞ < ε}` from an exhaustive scan.
/// Gaps are only observed ones; nothing is claimed beyond the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSet {
    pub epsilon: f64,
    pub horizon: u64,
    pub members: Vec<u64>,
    pub max_gap: u64,
    pub exhaustive: bool,
    pub nonempty: bool,
}

impl GapSet {
    pub fn contains(&self, j: u64) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    /// Differences between consecutive members.
    pub fn gaps(&self) -> Vec<u64> {
        self.members.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn gap_set(theta: &TorusPoint, eps: f64, horizon: u64) -> Result<GapSet> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ε must be positive, got {eps}"
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let members: Vec<u64> = (0..=horizon)
        .filter(|&j| theta.distance_to_identity(j) < eps)
        .collect();
    let max_gap = members.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    Ok(GapSet {
        epsilon: eps,
        horizon,
        nonempty: !members.is_empty(),
        members,
        max_gap,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn roots_of_unity() {
        for q in [2u64, 3, 5, 12] {
            let theta = TorusPoint::from_turns(&[1.0 / q as f64]);
            let eps = 0.9 * 2.0 * (std::f64::consts::PI / q as f64).sin();
            let g = gap_set(&theta, eps, 100).unwrap();
            assert!(g.members.iter().all(|j| j % q == 0));
            assert_eq!(g.members.len() as u64, 100 / q + 1);
            assert_eq!(g.max_gap, q);
        }
    }

    #[test]
    fn large_epsilon_takes_everything() {
        let theta = TorusPoint::from_turns(&[0.123, 0.77, 0.5]);
        let g = gap_set(&theta, 2.0 * 3f64.sqrt(), 50).unwrap();
        assert_eq!(g.members, (0..=50).collect::<Vec<_>>());
        assert_eq!(g.max_gap, 1);
    }

    #[test]
    fn irrational_rotation_three_gaps() {
        let theta = TorusPoint::from_turns(&[2f64.sqrt().fract()]);
        let g = gap_set(&theta, 0.1, 10_000).unwrap();
        assert!(g.nonempty && g.members.len() > 100);
        // Return times of a rotation to an interval take at most three gap
        // lengths, the largest being the sum of the other two.
        let distinct: BTreeSet<u64> = g.gaps().into_iter().collect();
        let v: Vec<u64> = distinct.into_iter().collect();
        assert!(v.len() <= 3, "{v:?}");
        if v.len() == 3 {
            assert_eq!(v[2], v[0] + v[1]);
        }
        assert!(g.max_gap <= *v.last().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let theta = TorusPoint::from_turns(&[0.1]);
        assert!(gap_set(&theta, 0.0, 10).is_err());
        assert!(gap_set(&theta, 0.1, 0).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_epsilon(t in 0.0f64..1.0, e1 in 0.01f64..2.0, e2 in 0.01f64..2.0) {
            let theta = TorusPoint::from_turns(&[t, (t * 7.0).fract()]);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = gap_set(&theta, lo, 300).unwrap();
            let b = gap_set(&theta, hi, 300).unwrap();
            prop_assert!(a.members.iter().all(|j| b.contains(*j)));
            prop_assert!(a.members.iter().all(|&j| j <= 300));
            prop_assert!(a.gaps().iter().all(|&g| g <= a.max_gap));
        }
    }
}
