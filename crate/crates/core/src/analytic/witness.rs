//! Witnesses `(z̃, k̃, δ)` with `log|z̃^{j.k̃}| > δe^{|j|μ±}` along return-time
//! sets `J₊ ⊂ N` and `−J₋`.
//!
//! With `u = log|z̃|` one has `log|z̃^{j.k̃}| = ⟨M^j u, k̃⟩`. Splitting off the
//! spectral projections of `u` onto the eigenvalues of extremal modulus,
//! `M^j u ≈ |λ₁|^j Σ θ_λ^j P_λ u` as `j → +∞` (and likewise with `λ_d` as
//! `j → −∞`). Whenever `θ^j` is within `ε` of the identity the pairing with
//! `k̃` stays above `2δ|λ₁|^j`, which the gap sets record; the finitely many
//! early indices where lower-order terms still matter are discarded.

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::gaps::{gap_set, GapSet};
use crate::dyadic::ln_positive_pairing;
use crate::error::{Error, Result};
use crate::intcore::{ComplexPoint, IntMatrix, LatticeVector, TorusPoint};
use crate::interval::Interval;
use crate::spectra::linalg::{eigenvector, to_complex, transpose};
use crate::spectra::{spectral_profile, SpectralProfile};

pub const DEFAULT_WITNESS_SEED: u64 = 0x5EED_0006;
const MAX_DRAWS: usize = 64;
const MAX_BOX: i64 = 8;
const BOX_BUDGET: u64 = 2_000_000;
/// Relative slack demanded of every log margin beyond f64 rounding.
const MARGIN_SLACK: f64 = 1e-9;

/// `ln⟨M^j u, k̃⟩ − (ln δ + |j|·μ±)`: positive iff
/// `log|z̃^{j.k̃}| > δe^{|j|μ±}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexMargin {
    pub j: i64,
    pub log_pairing: f64,
    pub log_bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub matrix: IntMatrix,
    pub z_tilde: ComplexPoint,
    /// `log|z̃|`, kept exactly; the inequalities are checked against it.
    pub log_z: Vec<f64>,
    pub k_tilde: LatticeVector,
    pub delta: f64,
    pub mu: Interval,
    pub mu_plus: Interval,
    pub mu_minus: Interval,
    pub epsilon_plus: f64,
    pub epsilon_minus: f64,
    /// Return times `j ≥ 0`.
    pub j_plus: GapSet,
    /// Return times `t ≥ 0`, standing for `j = −t`.
    pub j_minus: GapSet,
    pub discarded_plus: Vec<u64>,
    pub discarded_minus: Vec<u64>,
    pub verified_horizon: u64,
    pub margins_plus: Vec<IndexMargin>,
    pub margins_minus: Vec<IndexMargin>,
    pub seed: u64,
    pub draws: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub checked: usize,
    pub min_margin: f64,
    pub failures: Vec<String>,
}

struct Peripheral {
    lambda: Complex64,
    right: Vec<Complex64>,
    /// Left eigenvector scaled so that `left·right = 1`.
    left: Vec<Complex64>,
}

fn peripheral_set(a: &[Vec<f64>], p: &SpectralProfile, largest: bool) -> Result<Vec<Peripheral>> {
    let modulus = |r: &crate::spectra::RootRecord| Complex64::new(r.re, r.im).norm();
    let target =
        p.roots
            .iter()
            .map(modulus)
            .fold(if largest { 0.0 } else { f64::INFINITY }, |acc, m| {
                if largest {
                    acc.max(m)
                } else {
                    acc.min(m)
                }
            });
    let ca = to_complex(a);
    let cat = transpose(&ca);
    p.roots
        .iter()
        .filter(|r| (modulus(r) - target).abs() <= 1e-9 * target.max(1.0) + r.rad)
        .map(|r| {
            if r.mult != 1 {
                return Err(Error::SearchFailed(format!(
                    "eigenvalue {}{:+}i of extremal modulus is repeated",
                    r.re, r.im
                )));
            }
            let lambda = Complex64::new(r.re, r.im);
            let right = eigenvector(&ca, lambda)?;
            let left = eigenvector(&cat, lambda)?;
            let s: Complex64 = left.iter().zip(&right).map(|(x, y)| x * y).sum();
            if s.norm() < 1e-12 {
                return Err(Error::IllConditionedFrame(1.0 / s.norm()));
            }
            Ok(Peripheral {
                lambda,
                right,
                left: left.into_iter().map(|x| x / s).collect(),
            })
        })
        .collect()
}

/// Coordinates `(left·u)` of `u` along each peripheral eigenvector.
fn coefficients(set: &[Peripheral], u: &[f64]) -> Vec<Complex64> {
    set.iter()
        .map(|p| p.left.iter().zip(u).map(|(l, x)| l * x).sum())
        .collect()
}

fn projection(set: &[Peripheral], coeff: &[Complex64]) -> Vec<f64> {
    let d = set[0].right.len();
    (0..d)
        .map(|i| {
            set.iter()
                .zip(coeff)
                .map(|(p, c)| (p.right[i] * c).re)
                .sum()
        })
        .collect()
}

fn pairing(x: &[f64], k: &[i64]) -> f64 {
    x.iter().zip(k).map(|(a, b)| a * *b as f64).sum()
}

/// Best `k` in the smallest box `[−R,R]^d` with both pairings positive.
fn box_search(plus: &[f64], minus: &[f64]) -> Option<(Vec<i64>, f64)> {
    let d = plus.len();
    for r in 1..=MAX_BOX {
        let side = (2 * r + 1) as u64;
        if side.checked_pow(d as u32).map_or(true, |t| t > BOX_BUDGET) {
            return None;
        }
        let mut best: Option<(Vec<i64>, f64)> = None;
        let mut k = vec![-r; d];
        loop {
            let score = pairing(plus, &k).min(pairing(minus, &k));
            if score > 0.0 && best.as_ref().map_or(true, |b| score > b.1) {
                best = Some((k.clone(), score));
            }
            let mut i = 0;
            while i < d && k[i] == r {
                k[i] = -r;
                i += 1;
            }
            if i == d {
                break;
            }
            k[i] += 1;
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

fn margin_ok(m: &IndexMargin) -> bool {
    m.margin > MARGIN_SLACK * (1.0 + m.log_bound.abs())
}

/// Margins at every member; the prefix up to the last failure is dropped.
fn side_margins(
    members: &[u64],
    covectors: &[LatticeVector],
    u: &[f64],
    delta: f64,
    mu_hi: f64,
    sign: i64,
) -> (Vec<u64>, Vec<IndexMargin>) {
    let all: Vec<IndexMargin> = members
        .iter()
        .map(|&t| {
            let log_bound = delta.ln() + t as f64 * mu_hi;
            let log_pairing = ln_positive_pairing(u, covectors[t as usize].entries())
                .unwrap_or(f64::NEG_INFINITY);
            IndexMargin {
                j: sign * t as i64,
                log_pairing,
                log_bound,
                margin: log_pairing - log_bound,
            }
        })
        .collect();
    let cut = all.iter().rposition(|m| !margin_ok(m)).map_or(0, |i| i + 1);
    (members[..cut].to_vec(), all[cut..].to_vec())
}

pub fn witness_search(m: &IntMatrix, tol: f64, horizon: u64) -> Result<WitnessCertificate> {
    witness_search_seeded(m, tol, horizon, DEFAULT_WITNESS_SEED)
}

pub fn witness_search_seeded(
    m: &IntMatrix,
    tol: f64,
    horizon: u64,
    seed: u64,
) -> Result<WitnessCertificate> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let profile = match spectral_profile(m, tol) {
        Err(Error::ToleranceNotReached { .. }) => spectral_profile(m, f64::INFINITY)?,
        other => other?,
    };
    if profile.exact_one {
        return Err(Error::HypothesisViolated(
            "ρ(M) = 1: there is no exponential growth to witness".into(),
        ));
    }
    let a = m.to_f64();
    let plus_set = peripheral_set(&a, &profile, true)?;
    let minus_set = peripheral_set(&a, &profile, false)?;
    let d = m.dim();
    let inverse = m.inverse_unimodular()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = String::from("no admissible draw");
    for draw in 1..=MAX_DRAWS {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cp = coefficients(&plus_set, &u);
        let cm = coefficients(&minus_set, &u);
        let nonzero = |set: &[Peripheral], c: &[Complex64]| {
            set.iter().zip(c).all(|(p, c)| {
                (c * p.right.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).norm() > 1e-3
            })
        };
        if !(nonzero(&plus_set, &cp) && nonzero(&minus_set, &cm)) {
            failure = "degenerate Jordan coordinates".into();
            continue;
        }
        let u_plus = projection(&plus_set, &cp);
        let u_minus = projection(&minus_set, &cm);
        let Some((k, score)) = box_search(&u_plus, &u_minus) else {
            failure = format!("no k̃ with positive pairings in [−{MAX_BOX},{MAX_BOX}]^{d}");
            continue;
        };
        let delta = score / 3.03;
        let k_tilde = LatticeVector::from_i64(&k);
        // ⟨P_λ u, k̃⟩ for each peripheral eigenvalue.
        let weights = |set: &[Peripheral], c: &[Complex64]| -> f64 {
            set.iter()
                .zip(c)
                .map(|(p, c)| {
                    (p.right
                        .iter()
                        .zip(&k)
                        .map(|(r, ki)| r * *ki as f64)
                        .sum::<Complex64>()
                        * c)
                        .norm()
                })
                .sum()
        };
        let epsilon_plus = delta / weights(&plus_set, &cp);
        let epsilon_minus = delta / weights(&minus_set, &cm);
        let theta_plus = TorusPoint::from_turns(
            &plus_set
                .iter()
                .map(|p| p.lambda.arg() / TAU)
                .collect::<Vec<_>>(),
        );
        let theta_minus = TorusPoint::from_turns(
            &minus_set
                .iter()
                .map(|p| -p.lambda.arg() / TAU)
                .collect::<Vec<_>>(),
        );
        let j_plus = gap_set(&theta_plus, epsilon_plus, horizon)?;
        let j_minus = gap_set(&theta_minus, epsilon_minus, horizon)?;

        let mut forward = vec![k_tilde.clone()];
        let mut backward = vec![k_tilde.clone()];
        for _ in 0..horizon {
            forward.push(forward.last().expect("non-empty").times(m));
            backward.push(backward.last().expect("non-empty").times(&inverse));
        }
        let (discarded_plus, margins_plus) =
            side_margins(&j_plus.members, &forward, &u, delta, profile.mu_plus.hi, 1);
        let (discarded_minus, margins_minus) = side_margins(
            &j_minus.members,
            &backward,
            &u,
            delta,
            profile.mu_minus.hi,
            -1,
        );
        if margins_plus.is_empty() || margins_minus.is_empty() {
            failure = format!("every return time up to {horizon} was discarded");
            continue;
        }
        let mu_star = profile.mu_plus.max(&profile.mu_minus);
        if !mu_star.overlaps(&profile.mu) {
            return Err(Error::CertificationFailed(format!(
                "max(μ₊, μ₋) = {mu_star} misses μ = {}",
                profile.mu
            )));
        }
        return Ok(WitnessCertificate {
            matrix: m.clone(),
            z_tilde: ComplexPoint::from_log_moduli(&u)?,
            log_z: u,
            k_tilde,
            delta,
            mu: profile.mu,
            mu_plus: profile.mu_plus,
            mu_minus: profile.mu_minus,
            epsilon_plus,
            epsilon_minus,
            j_plus,
            j_minus,
            discarded_plus,
            discarded_minus,
            verified_horizon: horizon,
            margins_plus,
            margins_minus,
            seed,
            draws: draw,
        });
    }
    Err(Error::SearchFailed(format!(
        "{failure} after {MAX_DRAWS} draws"
    )))
}

/// Re-derives every recorded inequality from `(M, log|z̃|, k̃, δ)` with exact
/// integer powers of `M`, a fresh spectral profile and exact dyadic pairings.
pub fn check_witness(cert: &WitnessCertificate) -> Result<WitnessCheck> {
    let mut failures = Vec::new();
    let d = cert.matrix.dim();
    if cert.log_z.len() != d || cert.z_tilde.dim() != d || cert.k_tilde.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cert.log_z.len(),
        });
    }
    if !(cert.delta > 0.0 && cert.delta.is_finite()) {
        failures.push(format!("δ = {} is not positive", cert.delta));
    }
    for (i, (z, u)) in cert.z_tilde.coords().iter().zip(&cert.log_z).enumerate() {
        if (z.norm().ln() - u).abs() > 1e-12 * (1.0 + u.abs()) {
            failures.push(format!(
                "log|z̃_{i}| disagrees with the recorded log-modulus"
            ));
        }
    }
    let profile = spectral_profile(&cert.matrix, 1e-10)
        .or_else(|_| spectral_profile(&cert.matrix, f64::INFINITY))?;
    if profile.exact_one {
        failures.push("ρ(M) = 1".into());
    }
    if !profile.mu_plus.max(&profile.mu_minus).overlaps(&profile.mu) {
        failures.push("max(μ₊, μ₋) misses the μ enclosure".into());
    }
    let mut checked = 0;
    let mut min_margin = f64::INFINITY;
    let sides = [
        (
            &cert.j_plus,
            &cert.discarded_plus,
            &cert.margins_plus,
            profile.mu_plus.hi,
            1i64,
        ),
        (
            &cert.j_minus,
            &cert.discarded_minus,
            &cert.margins_minus,
            profile.mu_minus.hi,
            -1,
        ),
    ];
    for (set, discarded, margins, mu_hi, sign) in sides {
        if set.horizon < cert.verified_horizon || !set.members.windows(2).all(|w| w[0] < w[1]) {
            failures.push("malformed return-time set".into());
        }
        if set.gaps().iter().any(|&g| g > set.max_gap) {
            failures.push("recorded max gap is too small".into());
        }
        // Every kept member must carry a margin, in order.
        let kept: Vec<i64> = set
            .members
            .iter()
            .filter(|t| !discarded.contains(t) && **t <= cert.verified_horizon)
            .map(|&t| sign * t as i64)
            .collect();
        let recorded: Vec<i64> = margins.iter().map(|m| m.j).collect();
        if kept != recorded || kept.is_empty() {
            failures.push(format!(
                "margins do not cover the kept return times ({sign:+})"
            ));
        }
        for rec in margins {
            let power = cert.matrix.pow_signed(rec.j)?;
            let covector: Vec<BigInt> = (0..d)
                .map(|c| {
                    cert.k_tilde
                        .entries()
                        .iter()
                        .enumerate()
                        .map(|(r, k)| k * power.get(r, c))
                        .sum()
                })
                .collect();
            checked += 1;
            let Some(lp) = ln_positive_pairing(&cert.log_z, &covector) else {
                failures.push(format!("j = {}: log|z̃^(j.k̃)| is not positive", rec.j));
                continue;
            };
            let bound = cert.delta.ln() + rec.j.unsigned_abs() as f64 * mu_hi;
            let margin = lp - bound;
            min_margin = min_margin.min(margin);
            if !(margin > MARGIN_SLACK * (1.0 + bound.abs())) {
                failures.push(format!("j = {}: margin {margin} is not positive", rec.j));
            }
            if (margin - rec.margin).abs() > 1e-6 * (1.0 + margin.abs()) {
                failures.push(format!(
                    "j = {}: recorded margin {} vs {margin}",
                    rec.j, rec.margin
                ));
            }
        }
    }
    Ok(WitnessCheck {
        valid: failures.is_empty(),
        checked,
        min_margin,
        failures,
    })
}
