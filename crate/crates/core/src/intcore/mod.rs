//! Exact integer linear algebra over `GL_d(Z)`.
//!
//! Matrices and vectors carry arbitrary-precision entries. Covectors are
//! row vectors acted on from the right, `k ↦ k·M^j`; points of `(C*)^d` are
//! acted on through the rows of `M` as exponent tuples.

mod action;
pub(crate) mod json;
mod poly;

pub use action::{
    log_abs_monomial, orbit_classify, point_action, ComplexPoint, OrbitClass, TorusPoint,
};
pub(crate) use action::{root_of_unity_exponent, ComplexRepr};
pub use poly::{cyclotomic_indices_up_to, cyclotomic_table, euler_phi, IntPolynomial};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput(
                "matrix must have at least one row".into(),
            ));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(IntMatrix { dim, entries })
    }

    /// Convenience constructor; panics on a ragged or empty array.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("square, non-empty integer matrix")
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.dim)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for l in 0..d {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.get(i, j).clone();
            }
        }
        out
    }

    fn add_scalar_identity(&mut self, c: &BigInt) {
        for i in 0..self.dim {
            self.entries[i * self.dim + i] += c;
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Maximum absolute row sum, the operator norm for `x ↦ x·M` in ℓ¹.
    pub fn max_abs_row_sum(&self) -> BigInt {
        self.rows()
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    /// Non-negative power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `M^j` for any integer `j`; negative powers need a unimodular matrix.
    pub fn pow_signed(&self, j: i64) -> Result<IntMatrix> {
        if j >= 0 {
            Ok(self.pow(j as u64))
        } else {
            Ok(self.inverse_unimodular()?.pow(j.unsigned_abs()))
        }
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut a: Vec<Vec<BigInt>> = self.rows().map(|r| r.to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..d).find(|&r| !a[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[d - 1][d - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn require_unimodular(&self) -> Result<()> {
        let det = self.det();
        if det.abs().is_one() {
            Ok(())
        } else {
            Err(Error::NotUnimodular {
                det: det.to_string(),
            })
        }
    }

    /// Faddeev–LeVerrier recursion. Every division is exact, so the whole
    /// run stays in the integers. Returns the characteristic polynomial and
    /// the last auxiliary matrix `A^{n-1} + c_{n-1} A^{n-2} + … + c_1 I`.
    fn faddeev_leverrier(&self) -> (IntPolynomial, IntMatrix) {
        let n = self.dim;
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        let mut aux = Self::zeros(n);
        for k in 1..=n {
            let mut next = self.mul(&aux);
            next.add_scalar_identity(&c[n - k + 1]);
            let t = self.mul(&next).trace();
            c[n - k] = -(t / BigInt::from(k as u64));
            aux = next;
        }
        (IntPolynomial::new(c), aux)
    }

    /// Monic characteristic polynomial `det(xI - M)`, computed exactly.
    pub fn char_poly(&self) -> IntPolynomial {
        self.faddeev_leverrier().0
    }

    /// Exact inverse through Cayley–Hamilton: `M⁻¹ = -aux / c₀` with
    /// `c₀ = ±1`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let (p, aux) = self.faddeev_leverrier();
        let c0 = p.constant();
        if !c0.abs().is_one() {
            return Err(Error::NotUnimodular {
                det: self.det().to_string(),
            });
        }
        let s = -c0;
        Ok(IntMatrix {
            dim: self.dim,
            entries: aux.entries.into_iter().map(|x| x * &s).collect(),
        })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    rows: Vec<serde_json::Value>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim,
            rows: self
                .rows()
                .map(|r| serde_json::Value::Array(r.iter().map(json::to_value).collect()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MatrixRepr::deserialize(d)?;
        let rows: Vec<Vec<BigInt>> = r
            .rows
            .into_iter()
            .map(|row| {
                let v: Vec<json::Big> = serde_json::from_value(row).map_err(D::Error::custom)?;
                Ok(v.into_iter().map(|b| b.0).collect())
            })
            .collect::<std::result::Result<_, D::Error>>()?;
        if rows.len() != r.dim {
            return Err(D::Error::custom(format!(
                "dim {} but {} rows",
                r.dim,
                rows.len()
            )));
        }
        IntMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// Integer row vector `k = (k_1, …, k_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    entries: Vec<BigInt>,
}

impl LatticeVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        LatticeVector { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn l1_norm(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).sum()
    }

    pub fn sup_norm(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }

    /// The row-vector product `k·M`.
    pub fn times(&self, m: &IntMatrix) -> LatticeVector {
        assert_eq!(self.dim(), m.dim(), "dimension mismatch");
        let d = m.dim();
        let mut out = vec![BigInt::zero(); d];
        for (i, k) in self.entries.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += k * m.get(i, j);
            }
        }
        LatticeVector::new(out)
    }

    /// The column-vector product `M·u` with `self` read as a column.
    pub fn applied_by(&self, m: &IntMatrix) -> LatticeVector {
        assert_eq!(self.dim(), m.dim(), "dimension mismatch");
        LatticeVector::new(
            m.rows()
                .map(|r| r.iter().zip(&self.entries).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", cells.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    dim: usize,
    #[serde(
        serialize_with = "json::serialize_vec",
        deserialize_with = "json::deserialize_vec"
    )]
    entries: Vec<BigInt>,
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            dim: self.dim(),
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = VectorRepr::deserialize(d)?;
        if r.entries.len() != r.dim {
            return Err(serde::de::Error::custom(format!(
                "dim {} but {} entries",
                r.dim,
                r.entries.len()
            )));
        }
        Ok(LatticeVector::new(r.entries))
    }
}

/// `k·M^j`. Negative `j` requires a unimodular `M`.
pub fn covector_action(k: &LatticeVector, m: &IntMatrix, j: i64) -> Result<LatticeVector> {
    if k.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: k.dim(),
        });
    }
    let step = if j < 0 {
        m.inverse_unimodular()?
    } else {
        m.clone()
    };
    let mut out = k.clone();
    for _ in 0..j.unsigned_abs() {
        out = out.times(&step);
    }
    Ok(out)
}

/// The 4×4 matrix `N` of the four-dimensional example.
pub fn example_n() -> IntMatrix {
    IntMatrix::from_i64(&[
        [0, -2, -7, 9],
        [0, -10, -20, 29],
        [0, -13, -31, 43],
        [-1, -11, -36, 47],
    ])
}

/// Fibonacci matrix `[[1,1],[1,0]]`.
pub fn fibonacci_matrix() -> IntMatrix {
    IntMatrix::from_i64(&[[1, 1], [1, 0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unimodularity() {
        assert!(IntMatrix::identity(2).is_unimodular());
        assert!(example_n().is_unimodular());
        assert!(!IntMatrix::from_i64(&[[2, 0], [0, 1]]).is_unimodular());
        assert_eq!(example_n().det(), BigInt::one());
    }

    #[test]
    fn characteristic_polynomials() {
        assert_eq!(
            IntMatrix::identity(2).char_poly(),
            IntPolynomial::from_i64(&[1, -2, 1])
        );
        // det(xI - [[1,1],[1,0]]) = (x-1)x - 1
        assert_eq!(
            fibonacci_matrix().char_poly(),
            IntPolynomial::from_i64(&[-1, -1, 1])
        );
        assert_eq!(
            example_n().char_poly(),
            IntPolynomial::from_i64(&[1, -3, -1, -6, 1])
        );
    }

    #[test]
    fn inverses() {
        assert_eq!(
            IntMatrix::identity(3).inverse_unimodular().unwrap(),
            IntMatrix::identity(3)
        );
        assert_eq!(
            fibonacci_matrix().inverse_unimodular().unwrap(),
            IntMatrix::from_i64(&[[0, 1], [1, -1]])
        );
        let n = example_n();
        let inv = n.inverse_unimodular().unwrap();
        assert_eq!(n.mul(&inv), IntMatrix::identity(4));
        assert_eq!(inv.inverse_unimodular().unwrap(), n);
        assert!(matches!(
            IntMatrix::from_i64(&[[2, 0], [0, 1]]).inverse_unimodular(),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn covector_examples() {
        let k = LatticeVector::from_i64(&[1, 0]);
        let m = fibonacci_matrix();
        assert_eq!(covector_action(&k, &m, 0).unwrap(), k);
        assert_eq!(
            covector_action(&k, &m, 1).unwrap(),
            LatticeVector::from_i64(&[1, 1])
        );
        assert_eq!(
            covector_action(&k, &m, -1).unwrap(),
            LatticeVector::from_i64(&[0, 1])
        );
        assert!(covector_action(&k, &IntMatrix::from_i64(&[[2, 0], [0, 1]]), -1).is_err());
    }

    #[test]
    fn matrix_json_shape() {
        let m = fibonacci_matrix();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"dim":2,"rows":[[1,1],[1,0]]}"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<IntMatrix>(r#"{"dim":2,"rows":[[1,1]]}"#).is_err());
        let big: IntMatrix =
            serde_json::from_str(r#"{"dim":1,"rows":[["123456789012345678901234567890"]]}"#)
                .unwrap();
        assert_eq!(big.get(0, 0).to_string(), "123456789012345678901234567890");
    }

    fn unimodular_strategy(d: usize) -> impl Strategy<Value = IntMatrix> {
        // Products of elementary transvections and sign flips are unimodular.
        prop::collection::vec((0..d, 0..d, -2i64..=2, any::<bool>()), 1..8).prop_map(move |ops| {
            let mut m = IntMatrix::identity(d);
            for (i, j, c, flip) in ops {
                let mut e = IntMatrix::identity(d);
                if i != j {
                    e.set(i, j, BigInt::from(c));
                } else if flip {
                    e.set(i, i, BigInt::from(-1));
                }
                m = m.mul(&e);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn char_poly_constant_is_det_up_to_sign(m in (2usize..=4).prop_flat_map(unimodular_strategy)) {
            let p = m.char_poly();
            prop_assert!(p.is_monic());
            prop_assert_eq!(p.constant().abs(), m.det().abs());
            prop_assert!(p.constant().abs().is_one());
        }

        #[test]
        fn double_inverse_is_identity(m in (2usize..=4).prop_flat_map(unimodular_strategy)) {
            let inv = m.inverse_unimodular().unwrap();
            prop_assert_eq!(m.mul(&inv), IntMatrix::identity(m.dim()));
            prop_assert_eq!(inv.inverse_unimodular().unwrap(), m);
        }

        #[test]
        fn covector_group_law(
            m in (2usize..=4).prop_flat_map(unimodular_strategy),
            a in -4i64..=4,
            b in -4i64..=4,
            seed in prop::collection::vec(-3i64..=3, 4),
        ) {
            let k = LatticeVector::from_i64(&seed[..m.dim()]);
            let lhs = covector_action(&covector_action(&k, &m, a).unwrap(), &m, b).unwrap();
            let rhs = covector_action(&k, &m, a + b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
