//! Exact convex-hull membership by phase-one simplex over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Convex weights `λ ≥ 0`, `Σλ = 1`, with `Σ λ_k p_k = y`, if any exist.
/// Bland's rule keeps the pivoting finite.
pub(crate) fn hull_weights(
    points: &[Vec<BigRational>],
    y: &[BigRational],
) -> Option<Vec<BigRational>> {
    let n = points.len();
    if n == 0 {
        return None;
    }
    let dim = y.len();
    let m = dim + 1;
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); width]; m];
    for r in 0..m {
        for (k, p) in points.iter().enumerate() {
            t[r][k] = if r < dim {
                p[r].clone()
            } else {
                BigRational::one()
            };
        }
        t[r][n + r] = BigRational::one();
        t[r][width - 1] = if r < dim {
            y[r].clone()
        } else {
            BigRational::one()
        };
        if t[r][width - 1].is_negative() {
            for (c, v) in t[r].iter_mut().enumerate() {
                if c < n || c == width - 1 {
                    *v = -v.clone();
                }
            }
        }
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        // Reduced cost of column j for min Σ artificials.
        let entering = (0..n + m).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let artificial_cost = if j >= n {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            let mut rc = artificial_cost;
            for r in 0..m {
                if basis[r] >= n {
                    rc -= &t[r][j];
                }
            }
            rc.is_negative()
        });
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..m {
            if t[r][j].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][j];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = t[r][j].clone();
        for v in t[r].iter_mut() {
            *v = &*v / &piv;
        }
        for rr in 0..m {
            if rr != r && !t[rr][j].is_zero() {
                let f = t[rr][j].clone();
                for c in 0..width {
                    let sub = &f * &t[r][c];
                    t[rr][c] -= sub;
                }
            }
        }
        basis[r] = j;
    }
    let infeasibility: BigRational = (0..m)
        .filter(|&r| basis[r] >= n)
        .map(|r| t[r][width - 1].clone())
        .fold(BigRational::zero(), |a, b| a + b);
    if !infeasibility.is_zero() {
        return None;
    }
    let mut w = vec![BigRational::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            w[basis[r]] = t[r][width - 1].clone();
        }
    }
    // Independent check of the certificate.
    let sum: BigRational = w.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
    let ok = sum.is_one()
        && w.iter().all(|x| !x.is_negative())
        && (0..dim).all(|i| {
            points
                .iter()
                .zip(&w)
                .map(|(p, l)| &p[i] * l)
                .fold(BigRational::zero(), |a, b| a + b)
                == y[i]
        });
    ok.then_some(w)
}

pub(crate) fn int_point(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn square_membership() {
        let pts: Vec<Vec<BigRational>> = [[0, 0], [1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|p| vec![q(p[0], 1), q(p[1], 1)])
            .collect();
        assert!(hull_weights(&pts, &[q(1, 2), q(1, 3)]).is_some());
        assert!(hull_weights(&pts, &[q(1, 1), q(1, 1)]).is_some());
        assert!(hull_weights(&pts, &[q(3, 2), q(1, 3)]).is_none());
        assert!(hull_weights(&pts, &[q(-1, 100), q(1, 3)]).is_none());
    }
}
