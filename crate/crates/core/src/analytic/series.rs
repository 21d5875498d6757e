//! The series `f(w,z) = Ω(w̃)⁻¹ Σ_j Ω(w+j)Δ(w+j) z^{j.k}`, which is
//! invariant under `(w, z) ↦ (w+1, 1.z)` and restricts to `z^k` on
//! `{w̃} × (C*)^d`.
//!
//! Tail control. For `|j| ≥ j₀` every term is bounded by a majorant `U_j`
//! built from three facts: `|Ω(w+j)| ≤ exp(−cos(c·Im w)·e^{c(|j|−|Re w|)})`
//! with `c = 2π²/m`; `|Δ(w+j)| ≤ cosh(π Im(w−w̃))/π` once
//! `|j| ≥ 1 + |Re(w−w̃)|`; and `|z^{k'}| ≤ e^{L‖k'‖₁}` with
//! `L = max|log|z_i||` and `‖k·M^{±j}‖₁ ≤ C·γ^{|j|}`. When
//! `log U_{j+1} − log U_j ≤ −1` for every `j ≥ j₀` the tail is at most
//! `U_{j₀}/(1 − e^{−1})`. The polynomial variant runs the same argument with
//! `(1+|j|)^{p′}` growth and `|Ω(w+j)| ≤ exp(−(|j|−|Re w|)^{2p}/2)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use super::{delta_factor, StripPoint};
use crate::dyadic::bigint_abs_log2;
use crate::error::{Error, Result};
use crate::intcore::{root_of_unity_exponent, ComplexPoint, IntMatrix, LatticeVector};
use crate::interval::{two_pi_squared, up, Interval};
use crate::spectra::spectral_profile;
use crate::steinness::ModulusSpec;

const MAX_GROWTH_PERIOD: u64 = 4096;
const MAX_HORIZON: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SeriesVariant {
    /// `Ω(w) = exp(−2cosh(2π²w/m))`.
    Cosh { m: f64 },
    /// `Ω(w) = exp(−w^{2p})`, with orbit growth of degree `p_prime < 2p`.
    Polynomial { p: u32, p_prime: u32 },
}

/// `‖k·M^{±j}‖₁ ≤ constant·gamma^j` (Cosh variant) or
/// `≤ constant·(1+j)^degree` (polynomial variant), for all `j ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub gamma: f64,
    pub constant: f64,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub matrix: IntMatrix,
    pub modulus: ModulusSpec,
    pub k: LatticeVector,
    pub anchor: StripPoint,
    pub variant: SeriesVariant,
    pub forward: GrowthBound,
    pub backward: GrowthBound,
    /// `ρ + ε` is the larger of the two growth rates.
    pub epsilon: f64,
    pub rho: Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionValue {
    #[serde(with = "complex_pair")]
    pub value: Complex64,
    pub tail_bound: f64,
    pub horizon: u64,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn l1_up(v: &LatticeVector) -> f64 {
    up(v.l1_norm().to_f64().unwrap_or(f64::INFINITY), 2)
}

fn ln_big(x: &BigInt) -> f64 {
    bigint_abs_log2(x).map_or(f64::NEG_INFINITY, |l| l * LN_2)
}

/// First period `p = 2^i` with `‖M^p‖^{1/p} ≤ e^{target}`, giving
/// `‖k·M^j‖₁ ≤ max_{r<p} ‖k·M^r‖₁ · γ^j`.
fn geometric_growth(m: &IntMatrix, k: &LatticeVector, target: f64) -> Result<GrowthBound> {
    let mut power = m.clone();
    let mut kr = k.clone();
    let mut seen: u64 = 0;
    let mut constant: f64 = 0.0;
    let mut p: u64 = 1;
    while p <= MAX_GROWTH_PERIOD {
        while seen < p {
            constant = constant.max(l1_up(&kr));
            kr = kr.times(m);
            seen += 1;
        }
        let log_rate = up(ln_big(&power.max_abs_row_sum()) / p as f64, 8) + 1e-12;
        if log_rate <= target {
            return Ok(GrowthBound {
                gamma: up(log_rate.max(0.0).exp(), 4),
                constant,
                degree: 0,
            });
        }
        power = power.mul(&power);
        p *= 2;
    }
    Err(Error::HypothesisViolated(format!(
        "no norm bound ‖M^p‖^(1/p) ≤ e^{target} with p ≤ {MAX_GROWTH_PERIOD}"
    )))
}

/// For quasi-unipotent `M` with `M^L = I + N`, `N^ν = 0`:
/// `‖k·M^j‖₁ ≤ K·(1+j)^{ν−1}` with `K = max_r Σ_{i<ν} ‖k·M^r·N^i‖₁`.
fn polynomial_growth(m: &IntMatrix, k: &LatticeVector, l: u64) -> GrowthBound {
    let d = m.dim();
    let mut n = m.pow(l);
    for i in 0..d {
        let v = n.get(i, i) - 1;
        n.set(i, i, v);
    }
    let mut powers = vec![IntMatrix::identity(d)];
    while !powers.last().expect("non-empty").is_zero() {
        let next = powers.last().expect("non-empty").mul(&n);
        powers.push(next);
    }
    powers.pop();
    let nu = powers.len() as u32;
    let mut kr = k.clone();
    let mut constant: f64 = 0.0;
    for _ in 0..l {
        let s: f64 = powers.iter().map(|p| l1_up(&kr.times(p))).sum();
        constant = constant.max(up(s, 2));
        kr = kr.times(m);
    }
    GrowthBound {
        gamma: 1.0,
        constant,
        degree: nu.saturating_sub(1),
    }
}

impl SeriesSpec {
    /// Builds the series data for `(M, m, k, w̃)`. Matrices with `ρ(M) = 1`
    /// use the polynomial variant; otherwise the Cosh variant requires a
    /// finite modulus with `m·log ρ(M) < 2π²` certified.
    pub fn new(
        matrix: IntMatrix,
        modulus: ModulusSpec,
        k: LatticeVector,
        anchor: Complex64,
    ) -> Result<Self> {
        if k.dim() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                got: k.dim(),
            });
        }
        let anchor = StripPoint::new(anchor, modulus)?;
        let profile = match spectral_profile(&matrix, 1e-12) {
            Err(Error::ToleranceNotReached { .. }) => spectral_profile(&matrix, f64::INFINITY)?,
            other => other?,
        };
        let inverse = matrix.inverse_unimodular()?;
        let (variant, forward, backward) = if profile.exact_one {
            let l = root_of_unity_exponent(&matrix.char_poly()).ok_or_else(|| {
                Error::CertificationFailed("cyclotomic matrix without period".into())
            })?;
            let forward = polynomial_growth(&matrix, &k, l);
            let backward = polynomial_growth(&inverse, &k, l);
            let p_prime = forward.degree.max(backward.degree);
            (
                SeriesVariant::Polynomial {
                    p: p_prime / 2 + 1,
                    p_prime,
                },
                forward,
                backward,
            )
        } else {
            let ModulusSpec::Finite(m) = modulus else {
                return Err(Error::HypothesisViolated(format!(
                    "ρ(M) > 1 needs a finite modulus, got {modulus}"
                )));
            };
            let threshold = two_pi_squared().lo;
            let lhs = up(m * profile.mu.hi, 1);
            if !(lhs < threshold) {
                return Err(Error::HypothesisViolated(format!(
                    "m·log ρ(M) ≤ {lhs} is not certified below 2π²"
                )));
            }
            let c = threshold / m;
            let target = 0.5 * (profile.mu.hi + c);
            (
                SeriesVariant::Cosh { m },
                geometric_growth(&matrix, &k, target)?,
                geometric_growth(&inverse, &k, target)?,
            )
        };
        let epsilon = (forward.gamma.max(backward.gamma) - profile.rho.lo).max(0.0);
        Ok(SeriesSpec {
            matrix,
            modulus,
            k,
            anchor,
            variant,
            forward,
            backward,
            epsilon,
            rho: profile.rho,
        })
    }

    /// `log Ω(w)`, or `None` when `Ω(w)` underflows to zero.
    pub(crate) fn log_omega(&self, w: Complex64) -> Option<Complex64> {
        match self.variant {
            SeriesVariant::Cosh { m } => {
                let c = 2.0 * PI * PI / m;
                if (c * w.re).abs() > 700.0 {
                    return None;
                }
                Some(-2.0 * (c * w).cosh())
            }
            SeriesVariant::Polynomial { p, .. } => Some(-w.powu(2 * p)),
        }
    }

    fn require_in_strip(&self, w: &StripPoint) -> Result<()> {
        if let SeriesVariant::Cosh { m } = self.variant {
            if !(w.w().im.abs() < m / (4.0 * PI)) {
                return Err(Error::OutsideStrip {
                    re: w.w().re,
                    im: w.w().im,
                });
            }
        }
        Ok(())
    }

    /// Upper bound on `Σ_{j ≥ j0} |T_{±j}|` for one side, or `None` if the
    /// majorant is not yet geometrically decaying at `j0`.
    fn side_tail(&self, growth: &GrowthBound, w: Complex64, log_z: f64, j0: u64) -> Option<f64> {
        let a = w.re.abs();
        let shift = w - self.anchor.w();
        if (j0 as f64) < 1.0 + shift.re.abs() {
            return None;
        }
        let anchor_log = self.log_omega(self.anchor.w())?.re;
        let common = ((PI * shift.im).cosh() / PI).ln() - anchor_log;
        let j = j0 as f64;
        let log_u = match self.variant {
            SeriesVariant::Cosh { m } => {
                let c = 2.0 * PI * PI / m;
                let cb = (c * w.im).cos();
                let gamma = growth.gamma;
                let big_a = cb * (-c * a).exp() * c.exp_m1();
                let big_b = log_z * growth.constant * (gamma - 1.0);
                let step = -big_a * (c * j).exp() + big_b * gamma.powf(j);
                let slope = big_a * c * (c * j).exp() - big_b * gamma.ln() * gamma.powf(j);
                if !(step <= -1.0 && slope >= 0.0) {
                    return None;
                }
                -cb * (c * (j - a)).exp() + log_z * growth.constant * gamma.powf(j) + common
            }
            SeriesVariant::Polynomial { p, .. } => {
                let j1 = a + w.im.abs() / (PI / (6.0 * p as f64)).tan();
                let x = j - a;
                if !(j >= j1 && x > 0.0) {
                    return None;
                }
                let pf = p as f64;
                let deg = growth.degree as f64;
                let drift = if growth.degree == 0 {
                    0.0
                } else {
                    log_z * growth.constant * deg * (2.0 + j).powf(deg - 1.0)
                };
                if !(pf * x.powf(2.0 * pf - 1.0) - drift >= 1.0) {
                    return None;
                }
                -0.5 * x.powf(2.0 * pf) + log_z * growth.constant * (1.0 + j).powf(deg) + common
            }
        };
        if log_u.is_nan() {
            return None;
        }
        let tail = log_u.exp() / (1.0 - (-1.0f64).exp());
        tail.is_finite().then(|| up(tail, 4))
    }

    /// Smallest horizon `H` whose two-sided tail bound is at most `tol`.
    pub fn horizon_for(&self, w: &StripPoint, z: &ComplexPoint, tol: f64) -> Result<(u64, f64)> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let log_z = z
            .log_moduli()
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        for h in 0..MAX_HORIZON {
            let plus = self.side_tail(&self.forward, w.w(), log_z, h + 1);
            let minus = self.side_tail(&self.backward, w.w(), log_z, h + 1);
            if let (Some(p), Some(m)) = (plus, minus) {
                let total = up(p + m, 1);
                if total <= tol {
                    return Ok((h, total));
                }
            }
        }
        Err(Error::TailNotCertifiable {
            tol,
            horizon: MAX_HORIZON as usize,
        })
    }
}

fn check_dims(spec: &SeriesSpec, z: &ComplexPoint) -> Result<()> {
    if z.dim() != spec.matrix.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.matrix.dim(),
            got: z.dim(),
        });
    }
    Ok(())
}

/// `Σ_{|j| ≤ horizon}` of the series terms, each evaluated in the log
/// domain so that huge monomials meet tiny `Ω` factors without overflow.
pub fn monomial_section_truncated(
    spec: &SeriesSpec,
    w: &StripPoint,
    z: &ComplexPoint,
    horizon: u64,
) -> Result<Complex64> {
    check_dims(spec, z)?;
    spec.require_in_strip(w)?;
    let logs: Vec<Complex64> = z.coords().iter().map(|c| c.ln()).collect();
    let anchor = spec.anchor.w();
    let anchor_log = spec
        .log_omega(anchor)
        .ok_or_else(|| Error::HypothesisViolated("Ω vanishes numerically at the anchor".into()))?;
    let inverse = spec.matrix.inverse_unimodular()?;
    let term = |j: i64, kj: &LatticeVector| -> Complex64 {
        let wj = w.w() + j as f64;
        let Some(lo) = spec.log_omega(wj) else {
            return Complex64::zero();
        };
        let delta = delta_factor(wj, anchor);
        if delta == Complex64::zero() {
            return Complex64::zero();
        }
        let lz: Complex64 = kj
            .entries()
            .iter()
            .zip(&logs)
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, l)| e.to_f64().unwrap_or(f64::INFINITY) * l)
            .sum();
        (lo - anchor_log + delta.ln() + lz).exp()
    };
    let mut forward = vec![spec.k.clone()];
    let mut backward = vec![spec.k.clone()];
    for _ in 0..horizon {
        forward.push(forward.last().expect("non-empty").times(&spec.matrix));
        backward.push(backward.last().expect("non-empty").times(&inverse));
    }
    let mut sum = Complex64::zero();
    for t in (1..=horizon as usize).rev() {
        sum += term(-(t as i64), &backward[t]);
    }
    for (t, kj) in forward.iter().enumerate() {
        sum += term(t as i64, kj);
    }
    if !sum.is_finite() {
        return Err(Error::TailNotCertifiable {
            tol: f64::NAN,
            horizon: horizon as usize,
        });
    }
    Ok(sum)
}

/// `f(w, z)` truncated at the least horizon whose certified tail is `≤ tol`.
pub fn monomial_section(
    spec: &SeriesSpec,
    w: &StripPoint,
    z: &ComplexPoint,
    tol: f64,
) -> Result<SectionValue> {
    check_dims(spec, z)?;
    spec.require_in_strip(w)?;
    let (horizon, tail_bound) = spec.horizon_for(w, z, tol)?;
    Ok(SectionValue {
        value: monomial_section_truncated(spec, w, z, horizon)?,
        tail_bound,
        horizon,
    })
}
