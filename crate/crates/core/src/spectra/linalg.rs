//! Small dense complex linear algebra for eigenvector work.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Vec<Vec<Complex64>>;

pub fn to_complex(a: &[Vec<f64>]) -> CMatrix {
    a.iter()
        .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut m: CMatrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .expect("non-empty range");
        if m[p][k].norm() == 0.0 {
            return Err(Error::RankDeficient { rank: k, dim: n });
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..=n {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Ok(x)
}

/// Right eigenvector of `a` for the approximate eigenvalue `lambda`, by a
/// few steps of inverse iteration, normalized to unit Euclidean norm.
pub fn eigenvector(a: &CMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = a.len();
    let shift = lambda + Complex64::new(1e-10, 1e-10) * lambda.norm().max(1.0);
    let shifted: CMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { a[i][j] - shift } else { a[i][j] })
                .collect()
        })
        .collect();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64))
        .collect();
    for _ in 0..4 {
        let w = solve(&shifted, &v)?;
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::IllConditionedFrame(norm));
        }
        v = w.into_iter().map(|z| z / norm).collect();
    }
    Ok(v)
}

pub fn transpose(a: &CMatrix) -> CMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

pub fn mat_vec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `max_i |(A v − λ v)_i|`.
pub fn residual(a: &CMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    mat_vec(a, v)
        .iter()
        .zip(v)
        .map(|(av, vi)| (av - lambda * vi).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_eigenvector() {
        let a = to_complex(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let v = eigenvector(&a, Complex64::new(phi, 0.0)).unwrap();
        assert!(residual(&a, Complex64::new(phi, 0.0), &v) < 1e-12);
    }

    #[test]
    fn solve_roundtrip() {
        let a = to_complex(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)]).unwrap();
        assert!((x[0] - 1.0).norm() < 1e-14 && (x[1] - 1.0).norm() < 1e-14);
    }
}
