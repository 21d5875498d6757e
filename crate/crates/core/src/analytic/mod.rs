//! Function-theoretic witnesses: the monomial-extension series on
//! `S_m × (C*)^d`, Hartogs–Laurent coefficient extraction, bounded-gap
//! return sets of torus rotations, non-Steinness witnesses and a
//! finite-difference harmonic-measure oracle.

mod gaps;
mod harmonic;
mod laurent;
mod series;
mod witness;

pub use gaps::{gap_set, GapSet};
pub use harmonic::{harmonic_decay_fit, rectangle_harmonic_measure, DecayFit};
pub use laurent::laurent_coefficient;
pub use series::{
    monomial_section, monomial_section_truncated, GrowthBound, SectionValue, SeriesSpec,
    SeriesVariant,
};
pub use witness::{
    check_witness, witness_search, witness_search_seeded, IndexMargin, WitnessCertificate,
    WitnessCheck, DEFAULT_WITNESS_SEED,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::intcore::ComplexRepr;
use crate::steinness::ModulusSpec;

/// A point `w` of the strip `S_m = {|Im w| < m/(4π)}` (upper half-plane
/// for `m = ∞`, the whole plane for `m = 2∞`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StripRepr", into = "StripRepr")]
pub struct StripPoint {
    w: Complex64,
    modulus: ModulusSpec,
}

#[derive(Serialize, Deserialize)]
struct StripRepr {
    w: ComplexRepr,
    modulus: ModulusSpec,
}

impl TryFrom<StripRepr> for StripPoint {
    type Error = Error;
    fn try_from(r: StripRepr) -> Result<Self> {
        StripPoint::new(r.w.into(), r.modulus)
    }
}

impl From<StripPoint> for StripRepr {
    fn from(p: StripPoint) -> Self {
        StripRepr {
            w: p.w.into(),
            modulus: p.modulus,
        }
    }
}

/// Half-width `m/(4π)` of the strip, `None` when unbounded.
pub fn strip_half_width(modulus: ModulusSpec) -> Option<f64> {
    match modulus {
        ModulusSpec::Finite(m) => Some(m / (4.0 * PI)),
        _ => None,
    }
}

impl StripPoint {
    pub fn new(w: Complex64, modulus: ModulusSpec) -> Result<Self> {
        let inside = w.is_finite()
            && match modulus {
                ModulusSpec::Finite(m) => w.im.abs() < m / (4.0 * PI),
                ModulusSpec::Infinity => w.im > 0.0,
                ModulusSpec::TwoInfinity => true,
            };
        if inside {
            Ok(StripPoint { w, modulus })
        } else {
            Err(Error::OutsideStrip { re: w.re, im: w.im })
        }
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn modulus(&self) -> ModulusSpec {
        self.modulus
    }

    /// `w + t` for real `t`; the strip is invariant under real translation.
    pub fn shifted(&self, t: f64) -> StripPoint {
        StripPoint {
            w: self.w + t,
            modulus: self.modulus,
        }
    }
}

/// `Ω(w)`: `exp(−2cosh(2π²w/m))` for the Cosh variant, `exp(−w^{2p})` for
/// the polynomial one.
pub fn omega_factor(w: Complex64, spec: &SeriesSpec) -> Result<Complex64> {
    if let SeriesVariant::Cosh { m } = spec.variant {
        if !(w.im.abs() < m / (4.0 * PI)) {
            return Err(Error::OutsideStrip { re: w.re, im: w.im });
        }
    }
    Ok(spec
        .log_omega(w)
        .map_or(Complex64::new(0.0, 0.0), Complex64::exp))
}

/// `sin(πζ)` with the real part reduced modulo 2 first, so that `ζ ∈ Z`
/// gives an exact zero.
fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = z.re - n;
    let sign = if n.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    let (s, c) = (PI * r).sin_cos();
    let y = PI * z.im;
    Complex64::new(sign * s * y.cosh(), sign * c * y.sinh())
}

/// `Δ(w) = sin π(w−w̃) / (π(w−w̃))`: one at `w̃`, zero at `w̃ + j`, `j ≠ 0`.
pub fn delta_factor(w: Complex64, anchor: Complex64) -> Complex64 {
    let z = w - anchor;
    if z.norm() < 1e-3 {
        // Even Taylor series through degree 8.
        let s = (PI * z) * (PI * z);
        let mut acc = Complex64::new(1.0 / 362_880.0, 0.0);
        for c in [-1.0 / 5040.0, 1.0 / 120.0, -1.0 / 6.0, 1.0] {
            acc = acc * s + c;
        }
        return acc;
    }
    sin_pi(z) / (PI * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_membership() {
        let m = ModulusSpec::Finite(10.0);
        assert!(StripPoint::new(Complex64::new(3.0, 0.79), m).is_ok());
        assert!(matches!(
            StripPoint::new(Complex64::new(0.0, 0.8), m),
            Err(Error::OutsideStrip { .. })
        ));
        assert!(StripPoint::new(Complex64::new(0.0, -1.0), ModulusSpec::Infinity).is_err());
        assert!(StripPoint::new(Complex64::new(0.0, 1e6), ModulusSpec::TwoInfinity).is_ok());
        let p = StripPoint::new(Complex64::new(0.5, 0.1), m).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<StripPoint>(&s).unwrap(), p);
        assert!(
            serde_json::from_str::<StripPoint>(r#"{"w":{"re":0,"im":9},"modulus":10}"#).is_err()
        );
    }

    #[test]
    fn delta_interpolates() {
        let a = Complex64::new(0.3, -0.2);
        assert_eq!(delta_factor(a, a), Complex64::new(1.0, 0.0));
        for j in [-7i32, -1, 1, 5, 40] {
            assert!(delta_factor(a + j as f64, a).norm() < 1e-14, "j = {j}");
        }
        // Both branches agree near the switch radius.
        for r in [0.9e-3, 1.1e-3] {
            let w = a + Complex64::from_polar(r, 0.7);
            let z = PI * (w - a);
            let direct = z.sin() / z;
            assert!((delta_factor(w, a) - direct).norm() < 1e-15);
        }
    }

    #[test]
    fn delta_bounded_on_horizontal_lines() {
        let a = Complex64::new(0.0, 0.0);
        let bound = (PI * 0.4f64).cosh();
        let sup = (0..=2000)
            .map(|i| delta_factor(Complex64::new(-10.0 + 0.01 * i as f64, 0.4), a).norm())
            .fold(0.0, f64::max);
        assert!(sup.is_finite() && sup <= bound);
    }
}
