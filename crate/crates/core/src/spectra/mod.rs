//! Certified spectral data of integer matrices.
//!
//! `ρ(M) = 1` is decided exactly through the cyclotomic structure of the
//! characteristic polynomial; every other spectral quantity is an outward
//! rounded enclosure built from certified root discs.

mod irreducible;
pub mod linalg;
mod roots;

pub use irreducible::{is_irreducible, MAX_IRREDUCIBILITY_DEGREE};
pub(crate) use roots::monic_reversal;
pub use roots::{certify_roots, root_radius, CertifiedRoot, ResidualTier, RootCertificate};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intcore::{cyclotomic_table, IntMatrix, IntPolynomial};
use crate::interval::Interval;

/// True iff `p` is a product of cyclotomic polynomials, by exhaustive trial
/// division over every `Φ_n` with `φ(n) ≤ deg p`.
pub fn is_cyclotomic_product(p: &IntPolynomial) -> Result<bool> {
    p.require_monic()?;
    if p.constant().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let mut rest = p.clone();
    for (_, phi) in cyclotomic_table(p.degree()).iter() {
        if rest.degree() == 0 {
            break;
        }
        if phi.degree() > rest.degree() {
            continue;
        }
        while let Some(q) = rest.exact_div_monic(phi) {
            rest = q;
        }
    }
    Ok(rest.degree() == 0)
}

/// One approximate eigenvalue with its certified error radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub re: f64,
    pub im: f64,
    pub rad: f64,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub rho: Interval,
    pub exact_one: bool,
    pub mu: Interval,
    pub mu_plus: Interval,
    pub mu_minus: Interval,
    pub roots: Vec<RootRecord>,
}

impl SpectralProfile {
    /// Eigenvalue approximations, repeated by multiplicity.
    pub fn eigenvalues(&self) -> Vec<num_complex::Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(num_complex::Complex64::new(r.re, r.im)).take(r.mult))
            .collect()
    }
}

fn enclosure(p: &IntPolynomial, tol: f64) -> Result<(Interval, RootCertificate)> {
    let mut cert = certify_roots(p, ResidualTier::Fast)?;
    if cert.max_modulus().width() > tol {
        cert = certify_roots(p, ResidualTier::Exact)?;
    }
    let enc = cert.max_modulus();
    if enc.width() > tol {
        return Err(Error::ToleranceNotReached {
            width: enc.width(),
            tol,
        });
    }
    Ok((enc, cert))
}

/// `ρ(M)`, `μ = log ρ(M)`, `μ₊`, `μ₋` and the certified spectrum of `M`.
pub fn spectral_profile(m: &IntMatrix, tol: f64) -> Result<SpectralProfile> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    m.require_unimodular()?;
    let cp = m.char_poly();
    let exact_one = is_cyclotomic_product(&cp)?;
    let (plus, cert) = enclosure(&cp, tol)?;
    let roots = cert
        .roots()
        .iter()
        .map(|r| RootRecord {
            re: r.center.re,
            im: r.center.im,
            rad: r.radius,
            mult: r.multiplicity,
        })
        .collect();
    if exact_one {
        let zero = Interval::point(0.0);
        return Ok(SpectralProfile {
            rho: Interval::point(1.0),
            exact_one,
            mu: zero,
            mu_plus: zero,
            mu_minus: zero,
            roots,
        });
    }
    let (minus, _) = enclosure(&monic_reversal(&cp)?, tol)?;
    // Unimodular: max |λ| ≥ 1 and min |λ| ≤ 1.
    let clamp = |i: Interval| Interval::new(i.lo.max(1.0), i.hi.max(1.0));
    let (plus, minus) = (clamp(plus), clamp(minus));
    let rho = plus.max(&minus);
    if !(rho.lo > 1.0) {
        return Err(Error::CertificationFailed(format!(
            "ρ(M) is not 1 but its enclosure {rho} does not separate from 1"
        )));
    }
    let log = |i: Interval| {
        let l = i.ln();
        Interval::new(l.lo.max(0.0), l.hi.max(0.0))
    };
    Ok(SpectralProfile {
        rho,
        exact_one,
        mu: log(rho),
        mu_plus: log(plus),
        mu_minus: log(minus),
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intcore::{example_n, fibonacci_matrix};

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn cyclotomic_examples() {
        assert!(is_cyclotomic_product(&p(&[1, -2, 1])).unwrap());
        assert!(!is_cyclotomic_product(&p(&[-1, -1, 1])).unwrap());
        assert!(is_cyclotomic_product(&p(&[1, 1, 1, 1, 1])).unwrap());
        assert!(matches!(
            is_cyclotomic_product(&p(&[0, 1])),
            Err(Error::ZeroConstantTerm)
        ));
    }

    #[test]
    fn identity_profile() {
        let s = spectral_profile(&IntMatrix::identity(3), 1e-9).unwrap();
        assert!(s.exact_one);
        assert_eq!(s.rho, Interval::point(1.0));
    }

    #[test]
    fn fibonacci_profile() {
        let s = spectral_profile(&fibonacci_matrix(), 1e-10).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(s.rho.contains(phi));
        assert!(s.mu_plus.contains(phi.ln()));
        assert!(s.mu_minus.contains(phi.ln()));
    }

    #[test]
    fn spectrum_of_example_matrix() {
        let s = spectral_profile(&example_n(), 1e-10).unwrap();
        let mut got: Vec<(i64, i64)> = s
            .eigenvalues()
            .iter()
            .map(|z| ((z.re * 100.0).round() as i64, (z.im * 100.0).round() as i64))
            .collect();
        got.sort();
        assert_eq!(got, vec![(-25, -73), (-25, 73), (27, 0), (623, 0)]);
    }

    #[test]
    fn profile_json_shape() {
        let s = spectral_profile(&fibonacci_matrix(), 1e-10).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        for key in ["rho", "exact_one", "mu", "mu_plus", "mu_minus", "roots"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["roots"][0].get("rad").is_some());
    }
}
