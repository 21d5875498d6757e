//! Harmonic measure of the vertical sides of `[−α,α] × [−h′,h′]` seen from
//! the centre, by the five-point Laplacian: a sine transform in `y`
//! decouples the modes, each a tridiagonal system in `x`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `ω(0)` for boundary data 1 on `x = ±α` and 0 on `y = ±h′`. The `y`
/// direction has `grid` intervals (rounded to even); `x` uses a matching
/// spacing.
pub fn rectangle_harmonic_measure(alpha: f64, half_height: f64, grid: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite() && half_height > 0.0 && half_height.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need α > 0 and h′ > 0, got α = {alpha}, h′ = {half_height}"
        )));
    }
    if grid < 64 {
        return Err(Error::InvalidInput(format!(
            "grid must be at least 64, got {grid}"
        )));
    }
    let y_intervals = grid + grid % 2;
    let hy = 2.0 * half_height / y_intervals as f64;
    let ny = y_intervals - 1;
    let half_x = ((alpha / hy).ceil() as usize).max(1);
    let x_intervals = 2 * half_x;
    let hx = 2.0 * alpha / x_intervals as f64;
    let nx = x_intervals - 1;
    let centre_x = half_x - 1;
    let centre_y = y_intervals / 2;

    let mut omega = 0.0;
    let mut rhs = vec![0.0; nx];
    for k in 1..=ny {
        // Sine coefficient of the constant boundary value 1.
        let b: f64 = (1..=ny)
            .map(|j| (PI * (j * k) as f64 / y_intervals as f64).sin())
            .sum::<f64>()
            * 2.0
            / y_intervals as f64;
        if b.abs() < 1e-15 {
            continue;
        }
        let s = (PI * k as f64 / (2.0 * y_intervals as f64)).sin();
        let lambda = 4.0 * s * s / (hy * hy);
        let diag = 2.0 + hx * hx * lambda;
        // Thomas sweep for −u_{i−1} + diag·u_i − u_{i+1} = boundary terms.
        rhs.iter_mut().for_each(|r| *r = 0.0);
        rhs[0] += b;
        rhs[nx - 1] += b;
        let u = thomas(diag, &rhs)?;
        omega += u[centre_x] * (PI * (centre_y * k) as f64 / y_intervals as f64).sin();
    }
    if !omega.is_finite() {
        return Err(Error::NonConvergedSolve);
    }
    Ok(omega)
}

/// Solves the symmetric Toeplitz system `−u_{i−1} + d·u_i − u_{i+1} = r_i`.
fn thomas(diag: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut pivot = diag;
    c[0] = -1.0 / pivot;
    g[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag + c[i - 1];
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(Error::NonConvergedSolve);
        }
        c[i] = -1.0 / pivot;
        g[i] = (rhs[i] + g[i - 1]) / pivot;
    }
    let mut u = vec![0.0; n];
    u[n - 1] = g[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = g[i] - c[i] * u[i + 1];
    }
    if u.iter().all(|v| v.is_finite()) {
        Ok(u)
    } else {
        Err(Error::NonConvergedSolve)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub half_height: f64,
    pub grid: usize,
    /// `(α, log ω₀)` samples.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// `−π/(2h′)`: the rectangle has total height `2h′`.
    pub predicted_slope: f64,
    pub relative_error: f64,
}

/// Least-squares fit of `log ω₀` against `α`.
pub fn harmonic_decay_fit(alphas: &[f64], half_height: f64, grid: usize) -> Result<DecayFit> {
    if alphas.len() < 2 {
        return Err(Error::InvalidInput("need at least two values of α".into()));
    }
    let samples: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| Ok((a, rectangle_harmonic_measure(a, half_height, grid)?.ln())))
        .collect::<Result<_>>()?;
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput(
            "values of α must not all coincide".into(),
        ));
    }
    let slope = sxy / sxx;
    let predicted_slope = -PI / (2.0 * half_height);
    Ok(DecayFit {
        half_height,
        grid,
        intercept: my - slope * mx,
        relative_error: (slope / predicted_slope - 1.0).abs(),
        slope,
        predicted_slope,
        samples,
    })
}
