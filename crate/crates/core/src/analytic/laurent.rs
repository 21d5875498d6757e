//! Hartogs–Laurent coefficients `g_k(w)` by discrete integration over the
//! torus `|z_i| = r_i`.
//!
//! With `N` samples per axis the discrete transform returns
//! `Σ_{k' ≡ k mod N} g_{k'}(w) r^{k'−k}`, so the aliasing error is bounded by
//! the coefficients whose exponents agree with `k` modulo `N`. For the
//! monomial series these decay doubly exponentially along the orbit. The
//! estimate is repeated with `2N` samples and a disagreement is reported.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

use super::StripPoint;
use crate::error::{Error, Result};
use crate::intcore::{ComplexPoint, LatticeVector};

const MAX_SAMPLES: usize = 1 << 22;
const ALIASING_TOL: f64 = 1e-9;

/// `g_k(w)` for `f(w, z) = Σ_k g_k(w) z^k`, sampled on the torus of the
/// given radii with `samples_per_axis` points per coordinate.
pub fn laurent_coefficient<F>(
    f: F,
    k: &LatticeVector,
    w: &StripPoint,
    radii: &[f64],
    samples_per_axis: usize,
) -> Result<Complex64>
where
    F: Fn(&StripPoint, &ComplexPoint) -> Result<Complex64> + Sync,
{
    if radii.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: radii.len(),
        });
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "radius {r} is not a positive real"
        )));
    }
    let needed = k
        .sup_norm()
        .to_usize()
        .and_then(|s| s.checked_add(1))
        .and_then(|s| s.checked_mul(2))
        .ok_or_else(|| Error::InvalidInput("exponent too large to resolve".into()))?;
    let n = samples_per_axis;
    if !n.is_power_of_two() || n < needed {
        return Err(Error::InvalidInput(format!(
            "samples per axis must be a power of two ≥ {needed}, got {n}"
        )));
    }
    let coarse = torus_coefficient(&f, k, w, radii, n)?;
    let (fine, scale) = torus_coefficient(&f, k, w, radii, 2 * n)?;
    let diff = (coarse.0 - fine).norm();
    if diff > ALIASING_TOL * scale.max(1.0) {
        return Err(Error::AliasingSuspected(diff));
    }
    Ok(fine)
}

/// The coefficient of `z^k` at `n` samples per axis, and the largest sample
/// modulus (the scale for the aliasing test).
fn torus_coefficient<F>(
    f: &F,
    k: &LatticeVector,
    w: &StripPoint,
    radii: &[f64],
    n: usize,
) -> Result<(Complex64, f64)>
where
    F: Fn(&StripPoint, &ComplexPoint) -> Result<Complex64> + Sync,
{
    let d = radii.len();
    let total = n
        .checked_pow(d as u32)
        .filter(|&t| t <= MAX_SAMPLES)
        .ok_or_else(|| Error::InvalidInput(format!("{n}^{d} torus samples exceed the budget")))?;
    // Index `Σ_a i_a n^a`, axis 0 fastest.
    let mut data: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rest = idx;
            let coords: Vec<Complex64> = radii
                .iter()
                .map(|&r| {
                    let i = rest % n;
                    rest /= n;
                    Complex64::from_polar(r, TAU * i as f64 / n as f64)
                })
                .collect();
            f(w, &ComplexPoint::new(coords)?)
        })
        .collect::<Result<_>>()?;
    let scale = data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(Error::InvalidInput(
            "sampled function is not finite on the torus".into(),
        ));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut line = vec![Complex64::zero(); n];
    for axis in 0..d {
        let stride = n.pow(axis as u32);
        for base in 0..total {
            if (base / stride) % n != 0 {
                continue;
            }
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = data[base + t * stride];
            }
            fft.process(&mut line);
            for (t, v) in line.iter().enumerate() {
                data[base + t * stride] = *v;
            }
        }
    }
    let mut idx = 0;
    let mut log_radius_power = 0.0;
    for (a, (e, r)) in k.entries().iter().zip(radii).enumerate() {
        let e = e.to_i64().expect("bounded by the sample count");
        idx += (e.rem_euclid(n as i64) as usize) * n.pow(a as u32);
        log_radius_power += e as f64 * r.ln();
    }
    let value = data[idx] / total as f64 * (-log_radius_power).exp();
    Ok((value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steinness::ModulusSpec;

    fn w0() -> StripPoint {
        StripPoint::new(Complex64::new(0.0, 0.0), ModulusSpec::Finite(10.0)).unwrap()
    }

    #[test]
    fn monomial_orthogonality() {
        let k = LatticeVector::from_i64(&[2, -1]);
        let f = |_: &StripPoint, z: &ComplexPoint| Ok(z.monomial(k.entries()));
        for other in [[2, -1], [0, 0], [1, 3], [-3, -1]] {
            let kp = LatticeVector::from_i64(&other);
            let g = laurent_coefficient(f, &kp, &w0(), &[0.7, 1.6], 16).unwrap();
            let expect = if other == [2, -1] { 1.0 } else { 0.0 };
            assert!((g - expect).norm() < 1e-12, "{other:?}: {g}");
        }
    }

    #[test]
    fn constant_function() {
        let f = |_: &StripPoint, _: &ComplexPoint| Ok(Complex64::new(1.0, 0.0));
        let zero = LatticeVector::from_i64(&[0, 0, 0]);
        assert!(
            (laurent_coefficient(f, &zero, &w0(), &[1.0, 2.0, 0.5], 4).unwrap() - 1.0).norm()
                < 1e-14
        );
        let k = LatticeVector::from_i64(&[1, 0, -1]);
        assert!(
            laurent_coefficient(f, &k, &w0(), &[1.0, 2.0, 0.5], 4)
                .unwrap()
                .norm()
                < 1e-14
        );
    }

    #[test]
    fn aliasing_detected() {
        // 1/(1 − z/2) has slowly decaying coefficients 2^{−k}.
        let f = |_: &StripPoint, z: &ComplexPoint| Ok(1.0 / (1.0 - z.coords()[0] / 2.0));
        let k = LatticeVector::from_i64(&[1]);
        assert!(matches!(
            laurent_coefficient(f, &k, &w0(), &[1.0], 4),
            Err(Error::AliasingSuspected(_))
        ));
        let g = laurent_coefficient(f, &k, &w0(), &[1.0], 64).unwrap();
        assert!((g - 0.5).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_sampling() {
        let f = |_: &StripPoint, _: &ComplexPoint| Ok(Complex64::new(1.0, 0.0));
        let k = LatticeVector::from_i64(&[3]);
        assert!(laurent_coefficient(f, &k, &w0(), &[1.0], 6).is_err());
        assert!(laurent_coefficient(f, &k, &w0(), &[1.0], 4).is_err());
        assert!(laurent_coefficient(f, &k, &w0(), &[-1.0], 8).is_err());
    }
}
