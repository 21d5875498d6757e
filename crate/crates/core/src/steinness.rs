//! Steinness of the bundles `E_m(D, M)` as a certified decision procedure.
//!
//! `E_m(D, M)` is Stein exactly when `m·log ρ(M) ≤ 2π²`. Both sides are
//! enclosures, so a verdict is definite only when the two intervals are
//! separated; the boundary itself counts as Stein.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::intcore::IntMatrix;
use crate::interval::{two_pi_squared, Interval};
use crate::spectra::{is_irreducible, spectral_profile, SpectralProfile};

/// Modulus of the annulus `A_m = {1 < |w| < e^m}`, or one of the two
/// annuli of infinite modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModulusSpec {
    Finite(f64),
    Infinity,
    TwoInfinity,
}

impl ModulusSpec {
    pub fn finite(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(ModulusSpec::Finite(m))
        } else {
            Err(Error::InvalidInput(format!(
                "modulus must be a positive real, got {m}"
            )))
        }
    }
}

impl FromStr for ModulusSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(ModulusSpec::Infinity),
            "2inf" | "2∞" => Ok(ModulusSpec::TwoInfinity),
            t => {
                let m: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad modulus {t:?}")))?;
                ModulusSpec::finite(m)
            }
        }
    }
}

impl fmt::Display for ModulusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusSpec::Finite(m) => write!(f, "{m}"),
            ModulusSpec::Infinity => f.write_str("inf"),
            ModulusSpec::TwoInfinity => f.write_str("2inf"),
        }
    }
}

impl Serialize for ModulusSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ModulusSpec::Finite(m) => s.serialize_f64(*m),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ModulusSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::InvalidInput("bad modulus".into()))
                .and_then(ModulusSpec::finite),
            serde_json::Value::String(s) => s.parse(),
            _ => Err(Error::InvalidInput(format!("bad modulus {v}"))),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    Stein,
    NotStein,
    /// Not Stein, and moreover every holomorphic function on `E_m` comes
    /// from the base annulus.
    NotSteinBaseOnly,
    Indeterminate {
        width: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "enclosure")]
pub enum CriticalModulus {
    Finite(Interval),
    InfiniteCritical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictInputs {
    pub matrix: IntMatrix,
    pub modulus: ModulusSpec,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub certified: bool,
    pub critical_modulus: CriticalModulus,
    /// Enclosure of `m·log ρ(M)` for finite moduli.
    pub m_log_rho: Option<Interval>,
    pub inputs: VerdictInputs,
}

/// Profile at `tol`, falling back to the tightest enclosure available when
/// `tol` cannot be met; a looser enclosure only risks `Indeterminate`.
fn profile(m: &IntMatrix, tol: f64) -> Result<SpectralProfile> {
    match spectral_profile(m, tol) {
        Err(Error::ToleranceNotReached { .. }) => spectral_profile(m, f64::INFINITY),
        other => other,
    }
}

fn critical_from(p: &SpectralProfile) -> CriticalModulus {
    if p.exact_one {
        CriticalModulus::InfiniteCritical
    } else {
        CriticalModulus::Finite(p.mu.recip_times(&two_pi_squared()))
    }
}

/// `m̃ = 2π²/log ρ(M)`, or `InfiniteCritical` when `ρ(M) = 1`.
pub fn critical_modulus(m: &IntMatrix, tol: f64) -> Result<CriticalModulus> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let rough = spectral_profile(m, 1e-3)?;
    if rough.exact_one {
        return Ok(CriticalModulus::InfiniteCritical);
    }
    // d m̃ = 2π² dμ / μ² and dμ = dρ / ρ.
    let mu = rough.mu.lo;
    let rho = rough.rho.lo;
    let rho_tol = (0.5 * tol * mu * mu * rho / two_pi_squared().hi).max(f64::MIN_POSITIVE);
    let p = profile(m, rho_tol)?;
    let c = critical_from(&p);
    if let CriticalModulus::Finite(e) = c {
        if e.width() > tol {
            return Err(Error::ToleranceNotReached {
                width: e.width(),
                tol,
            });
        }
    }
    Ok(c)
}

/// Decides whether `E_m(D, M)` is Stein.
pub fn classify(m: &IntMatrix, modulus: ModulusSpec, tol: f64) -> Result<SteinVerdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if let ModulusSpec::Finite(v) = modulus {
        ModulusSpec::finite(v)?;
    }
    let p = profile(m, tol)?;
    let inputs = VerdictInputs {
        matrix: m.clone(),
        modulus,
        tol,
    };
    let critical_modulus = critical_from(&p);
    if p.exact_one {
        return Ok(SteinVerdict {
            verdict: Verdict::Stein,
            certified: true,
            critical_modulus,
            m_log_rho: match modulus {
                ModulusSpec::Finite(_) => Some(Interval::point(0.0)),
                _ => None,
            },
            inputs,
        });
    }
    let (verdict, m_log_rho) = match modulus {
        ModulusSpec::Infinity | ModulusSpec::TwoInfinity => (Verdict::NotStein, None),
        ModulusSpec::Finite(v) => {
            let prod = p.mu.scale(v);
            let bound = two_pi_squared();
            let verdict = if prod.hi <= bound.lo {
                Verdict::Stein
            } else if prod.lo > bound.hi {
                match is_irreducible(&m.char_poly()) {
                    Ok(true) => Verdict::NotSteinBaseOnly,
                    Ok(false) | Err(Error::DegreeTooLarge { .. }) => Verdict::NotStein,
                    Err(e) => return Err(e),
                }
            } else {
                Verdict::Indeterminate {
                    width: prod.width(),
                }
            };
            (verdict, Some(prod))
        }
    };
    Ok(SteinVerdict {
        certified: !matches!(verdict, Verdict::Indeterminate { .. }),
        verdict,
        critical_modulus,
        m_log_rho,
        inputs,
    })
}

/// `μ(d) = 2π² / log(1 + μ′(d))`.
pub fn mu_threshold(mu_prime: f64) -> Result<f64> {
    if !(mu_prime > 0.0) || !mu_prime.is_finite() {
        return Err(Error::NonPositiveMargin(mu_prime));
    }
    Ok(2.0 * std::f64::consts::PI * std::f64::consts::PI / mu_prime.ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intcore::fibonacci_matrix;

    #[test]
    fn identity_is_stein_everywhere() {
        for m in [
            ModulusSpec::Finite(1e6),
            ModulusSpec::Infinity,
            ModulusSpec::TwoInfinity,
        ] {
            let v = classify(&IntMatrix::identity(2), m, 1e-12).unwrap();
            assert_eq!(v.verdict, Verdict::Stein);
            assert!(v.certified);
        }
        assert_eq!(
            critical_modulus(&IntMatrix::identity(3), 1e-9).unwrap(),
            CriticalModulus::InfiniteCritical
        );
    }

    #[test]
    fn fibonacci_verdicts() {
        let f = fibonacci_matrix();
        assert_eq!(
            classify(&f, ModulusSpec::Finite(10.0), 1e-12)
                .unwrap()
                .verdict,
            Verdict::Stein
        );
        assert_eq!(
            classify(&f, ModulusSpec::Finite(100.0), 1e-12)
                .unwrap()
                .verdict,
            Verdict::NotSteinBaseOnly
        );
        assert_eq!(
            classify(&f, ModulusSpec::Infinity, 1e-12).unwrap().verdict,
            Verdict::NotStein
        );
    }

    #[test]
    fn critical_modulus_values() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let oracle = 2.0 * std::f64::consts::PI.powi(2) / phi.ln();
        let CriticalModulus::Finite(e) = critical_modulus(&fibonacci_matrix(), 1e-9).unwrap()
        else {
            panic!("expected finite");
        };
        assert!((e.mid() - oracle).abs() < 1e-9);
        assert!((e.mid() - 41.019).abs() < 1e-3);
        let c = IntMatrix::from_i64(&[[0, -1], [1, 3]]);
        let CriticalModulus::Finite(e2) = critical_modulus(&c, 1e-9).unwrap() else {
            panic!("expected finite");
        };
        assert!((e2.mid() - oracle / 2.0).abs() < 1e-9);
    }

    #[test]
    fn boundary_is_not_misclassified() {
        let f = fibonacci_matrix();
        let CriticalModulus::Finite(e) = critical_modulus(&f, 1e-9).unwrap() else {
            panic!()
        };
        let v = classify(&f, ModulusSpec::Finite(e.mid()), 1e-12).unwrap();
        assert!(matches!(
            v.verdict,
            Verdict::Stein | Verdict::Indeterminate { .. }
        ));
        let below = classify(&f, ModulusSpec::Finite(e.lo * (1.0 - 1e-9)), 1e-12).unwrap();
        assert_eq!(below.verdict, Verdict::Stein);
        let above = classify(&f, ModulusSpec::Finite(e.hi * (1.0 + 1e-9)), 1e-12).unwrap();
        assert_eq!(above.verdict, Verdict::NotSteinBaseOnly);
    }

    #[test]
    fn mu_threshold_values() {
        let tps = 2.0 * std::f64::consts::PI.powi(2);
        assert!((mu_threshold(std::f64::consts::E - 1.0).unwrap() - tps).abs() < 1e-12);
        let v = mu_threshold(2f64.sqrt() - 1.0).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI.powi(2) / 2f64.ln()).abs() < 1e-9);
        assert!((v - 56.957).abs() < 2e-3);
        assert!(matches!(
            mu_threshold(0.0),
            Err(Error::NonPositiveMargin(_))
        ));
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let t = mu_threshold(i as f64 * 0.01).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn modulus_parsing() {
        assert_eq!("inf".parse::<ModulusSpec>().unwrap(), ModulusSpec::Infinity);
        assert_eq!(
            "2inf".parse::<ModulusSpec>().unwrap(),
            ModulusSpec::TwoInfinity
        );
        assert_eq!(
            "41.02".parse::<ModulusSpec>().unwrap(),
            ModulusSpec::Finite(41.02)
        );
        assert!("-1".parse::<ModulusSpec>().is_err());
        let json = serde_json::to_string(&ModulusSpec::TwoInfinity).unwrap();
        assert_eq!(json, "\"2inf\"");
        let back: ModulusSpec = serde_json::from_str("12.5").unwrap();
        assert_eq!(back, ModulusSpec::Finite(12.5));
    }

    #[test]
    fn verdict_json() {
        let v = classify(&fibonacci_matrix(), ModulusSpec::Finite(100.0), 1e-12).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["kind"], "NotSteinBaseOnly");
        assert_eq!(j["certified"], true);
    }
}
