use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{cyclotomic_table, IntMatrix, IntPolynomial, LatticeVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(z: ComplexRepr) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Point of `(C*)^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComplexRepr>", into = "Vec<ComplexRepr>")]
pub struct ComplexPoint {
    coords: Vec<Complex64>,
}

impl TryFrom<Vec<ComplexRepr>> for ComplexPoint {
    type Error = Error;
    fn try_from(v: Vec<ComplexRepr>) -> Result<Self> {
        ComplexPoint::new(v.into_iter().map(Complex64::from).collect())
    }
}

impl From<ComplexPoint> for Vec<ComplexRepr> {
    fn from(p: ComplexPoint) -> Self {
        p.coords.into_iter().map(ComplexRepr::from).collect()
    }
}

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = coords
            .iter()
            .position(|z| z.norm() == 0.0 || !z.is_finite())
        {
            return Err(Error::ZeroCoordinate { index });
        }
        Ok(ComplexPoint { coords })
    }

    /// Point with `|z_i| = e^{x_i}` and zero arguments.
    pub fn from_log_moduli(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Complex64::new(v.exp(), 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `(log|z_1|, …, log|z_d|)`.
    pub fn log_moduli(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.norm().ln()).collect()
    }

    /// `z^k = z_1^{k_1}⋯z_d^{k_d}`, accumulated in the log domain so that
    /// large partial powers cannot overflow.
    pub fn monomial(&self, k: &[BigInt]) -> Complex64 {
        let small: Option<Vec<i32>> = k
            .iter()
            .zip(&self.coords)
            .map(|(e, z)| {
                e.to_i32()
                    .filter(|v| v.unsigned_abs() <= 64 && (*v as f64 * z.norm().ln()).abs() < 300.0)
            })
            .collect();
        if let Some(exps) = small {
            return self
                .coords
                .iter()
                .zip(exps)
                .map(|(z, e)| z.powi(e))
                .product();
        }
        let mut log_mod = 0.0;
        let mut turns = 0.0;
        for (z, e) in self.coords.iter().zip(k) {
            let e = e.to_f64().unwrap_or(f64::INFINITY);
            log_mod += e * z.norm().ln();
            // Reduce each phase modulo one turn before summing.
            let t = e * (z.arg() / std::f64::consts::TAU);
            turns += t - t.round();
        }
        Complex64::from_polar(log_mod.exp(), std::f64::consts::TAU * turns)
    }
}

/// Point of the compact torus `(S¹)^p`, kept as fractions of a turn so that
/// rational angles stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    turns: Vec<f64>,
    tolerance: f64,
}

impl TorusPoint {
    /// From unit complex numbers; each modulus must be within `tol` of one.
    pub fn new(coords: &[Complex64], tol: f64) -> Result<Self> {
        for (i, z) in coords.iter().enumerate() {
            if !((z.norm() - 1.0).abs() <= tol) {
                return Err(Error::InvalidInput(format!(
                    "torus coordinate {i} has modulus {} (tolerance {tol})",
                    z.norm()
                )));
            }
        }
        Ok(TorusPoint {
            turns: coords
                .iter()
                .map(|z| (z.arg() / std::f64::consts::TAU).rem_euclid(1.0))
                .collect(),
            tolerance: tol,
        })
    }

    /// `θ_i = e^{2πi t_i}`.
    pub fn from_turns(turns: &[f64]) -> Self {
        TorusPoint {
            turns: turns.iter().map(|t| t.rem_euclid(1.0)).collect(),
            tolerance: 0.0,
        }
    }

    pub fn turns(&self) -> &[f64] {
        &self.turns
    }

    pub fn dim(&self) -> usize {
        self.turns.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn coords(&self) -> Vec<Complex64> {
        self.turns
            .iter()
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t))
            .collect()
    }

    /// `‖(1,…,1) − θ^j‖∞`, using `|1 − e^{2πiφ}| = 2|sin πφ|` on the
    /// reduced phase.
    pub fn distance_to_identity(&self, j: u64) -> f64 {
        self.turns
            .iter()
            .map(|t| {
                let phase = j as f64 * t;
                let r = phase - phase.round();
                2.0 * (std::f64::consts::PI * r).sin().abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `j.z`: the `j`-th iterate of `z ↦ (z^{M_1}, …, z^{M_d})` with `M_i` the
/// rows of `M`.
pub fn point_action(z: &ComplexPoint, m: &IntMatrix, j: i64) -> Result<ComplexPoint> {
    if z.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: z.dim(),
        });
    }
    let p = m.pow_signed(j)?;
    ComplexPoint::new(p.rows().map(|row| z.monomial(row)).collect())
}

/// `log|z^k| = ⟨k, log|z|⟩`.
pub fn log_abs_monomial(z: &ComplexPoint, k: &LatticeVector) -> Result<f64> {
    if z.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: k.dim(),
        });
    }
    Ok(k.to_f64()
        .iter()
        .zip(z.log_moduli())
        .map(|(a, b)| a * b)
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "period")]
pub enum OrbitClass {
    Finite(u64),
    Free,
    Unknown,
}

/// Least common multiple of the orders `n` of the cyclotomic factors `Φ_n`
/// dividing `p`, or `None` when `p` has no root of unity among its roots.
pub(crate) fn root_of_unity_exponent(p: &IntPolynomial) -> Option<u64> {
    let mut l: Option<u64> = None;
    for (n, phi) in cyclotomic_table(p.degree()).iter() {
        if p.exact_div_monic(phi).is_some() {
            let n = *n as u64;
            l = Some(l.map_or(n, |acc| acc.lcm(&n)));
        }
    }
    l
}

/// Classifies the `Z`-orbit of the covector `k` under `M`.
///
/// An orbit `{k·M^j}` is finite exactly when `k·M^p = k` for some `p ≥ 1`.
/// Then `M` acts with finite order on the span of the orbit, whose
/// eigenvalues are roots of unity of `char_poly(M)`; hence `k·M^L = k` for
/// `L` the lcm of their orders. Testing that single identity decides
/// finiteness exactly; the minimal period is the least divisor of `L` that
/// fixes `k`. `Unknown` is returned only when that period exceeds `cap`.
pub fn orbit_classify(k: &LatticeVector, m: &IntMatrix, cap: u64) -> Result<OrbitClass> {
    if k.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: k.dim(),
        });
    }
    m.require_unimodular()?;
    if k.is_zero() {
        return Ok(OrbitClass::Finite(1));
    }
    let Some(l) = root_of_unity_exponent(&m.char_poly()) else {
        return Ok(OrbitClass::Free);
    };
    if k.times(&m.pow(l)) != *k {
        return Ok(OrbitClass::Free);
    }
    let mut divisors: Vec<u64> = (1..=l).filter(|q| l % q == 0).collect();
    divisors.sort_unstable();
    for q in divisors {
        if q > cap {
            return Ok(OrbitClass::Unknown);
        }
        if k.times(&m.pow(q)) == *k {
            return Ok(OrbitClass::Finite(q));
        }
    }
    unreachable!("k·M^L = k so some divisor of L fixes k")
}
