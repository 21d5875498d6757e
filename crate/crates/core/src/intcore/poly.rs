use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::json;
use crate::error::{Error, Result};

/// Dense polynomial with arbitrary-precision integer coefficients, stored
/// lowest degree first. Trailing zeros are stripped, so the last coefficient
/// is the leading one (the zero polynomial is `[0]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        IntPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("never empty")
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn require_monic(&self) -> Result<()> {
        if self.is_monic() {
            Ok(())
        } else {
            Err(Error::NotMonic)
        }
    }

    /// Coefficients converted to `f64`, lowest degree first.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Coefficients as `i64` if every one fits.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| {
                acc * z + c.to_f64().unwrap_or(f64::NAN)
            })
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::from_i64(&[0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Division by a monic divisor; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree();
        if self.degree() < dd || self.is_zero() {
            return (Self::from_i64(&[0]), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd].clone();
            if q.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * d;
            }
            quot[k] = q;
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient by a monic divisor, if it divides.
    pub fn exact_div_monic(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem_monic(divisor);
        r.is_zero().then_some(q)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let g = if self.leading().is_negative() { -g } else { g };
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Greatest common divisor in Z[x], normalized primitive with positive
    /// leading coefficient (primitive pseudo-remainder sequence).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part() };
        }
        a.primitive_part()
    }

    fn pseudo_rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree();
        let lc = divisor.leading().clone();
        let mut rem = self.coeffs.clone();
        while rem.len() > dd {
            let top = rem.len() - 1;
            let t = rem[top].clone();
            if t.is_zero() {
                rem.pop();
                continue;
            }
            for c in rem.iter_mut() {
                *c *= &lc;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[top - dd + i] -= &t * d;
            }
            rem.pop();
        }
        Self::new(rem)
    }

    /// For monic input: the monic square-free part, carrying every distinct
    /// root exactly once.
    pub fn square_free_part(&self) -> Self {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        let mut q = self.exact_div_monic(&g).expect("gcd divides");
        if q.leading().is_negative() {
            q = q.neg();
        }
        q
    }

    pub fn is_square_free(&self) -> bool {
        self.degree() == 0 || self.gcd(&self.derivative()).degree() == 0
    }

    /// Splits `self = x^v · q` with `q(0) != 0`.
    pub fn strip_x_power(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let v = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (v, Self::new(self.coeffs[v..].to_vec()))
    }

    /// `x^deg · P(1/x)`: the coefficient list reversed.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// The n-th cyclotomic polynomial Φ_n, from the Möbius product
    /// `Φ_n = ∏_{d | n} (x^d − 1)^{μ(n/d)}`.
    pub fn cyclotomic(n: usize) -> Self {
        assert!(n >= 1, "cyclotomic index must be positive");
        let x_pow_minus_one = |d: usize| {
            let mut p = Self::monomial(d);
            p.coeffs[0] = BigInt::from(-1);
            p
        };
        let divs = divisors(n);
        let mut num = Self::one();
        for &d in &divs {
            if mobius(n / d) == 1 {
                num = num.mul(&x_pow_minus_one(d));
            }
        }
        for &d in &divs {
            if mobius(n / d) == -1 {
                num = num
                    .exact_div_monic(&x_pow_minus_one(d))
                    .expect("Möbius product is a polynomial");
            }
        }
        if num.leading().is_negative() {
            num = num.neg();
        }
        num
    }
}

fn mobius(n: usize) -> i32 {
    let mut m = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// `(n, Φ_n)` for every n with φ(n) ≤ `phi_bound`, memoized per bound.
pub fn cyclotomic_table(phi_bound: usize) -> Arc<Vec<(usize, IntPolynomial)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(usize, IntPolynomial)>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache poisoned").get(&phi_bound) {
        return Arc::clone(t);
    }
    let table: Arc<Vec<_>> = Arc::new(
        cyclotomic_indices_up_to(phi_bound)
            .into_iter()
            .map(|n| (n, IntPolynomial::cyclotomic(n)))
            .collect(),
    );
    cache
        .lock()
        .expect("cache poisoned")
        .insert(phi_bound, Arc::clone(&table));
    table
}

pub(crate) fn divisors(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=n)
        .take_while(|i| i * i <= n)
        .filter(|i| n % i == 0)
        .collect();
    let mut upper: Vec<usize> = out
        .iter()
        .rev()
        .map(|i| n / i)
        .filter(|&j| j * j != n)
        .collect();
    out.append(&mut upper);
    out
}

/// Euler's totient.
pub fn euler_phi(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// All n with φ(n) ≤ bound, ascending. φ(n) ≥ sqrt(n/2), so n ≤ 2·bound²
/// covers every candidate.
pub fn cyclotomic_indices_up_to(phi_bound: usize) -> Vec<usize> {
    let limit = (2 * phi_bound * phi_bound).max(2);
    (1..=limit).filter(|&n| euler_phi(n) <= phi_bound).collect()
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    #[serde(
        serialize_with = "json::serialize_vec",
        deserialize_with = "json::deserialize_vec"
    )]
    coeffs_low_to_high: Vec<BigInt>,
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            coeffs_low_to_high: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        if r.coeffs_low_to_high.is_empty() {
            return Err(serde::de::Error::custom("empty coefficient list"));
        }
        Ok(IntPolynomial::new(r.coeffs_low_to_high))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if i == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}
