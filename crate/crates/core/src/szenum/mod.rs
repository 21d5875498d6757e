//! Monic integer polynomials of small house.
//!
//! The house of `P` is the largest modulus of its roots. For fixed degree
//! and ceiling `a` only finitely many monic integer polynomials have house
//! at most `a`; this module enumerates them, extracts the smallest house
//! above one, and builds unimodular companion matrices.

mod walk;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::intcore::{IntMatrix, IntPolynomial};
use crate::interval::Interval;
use crate::spectra::{certify_roots, ResidualTier};
use walk::{level_range, set_level, Bounds, State};

/// Largest degree accepted by [`sz_margin`].
pub const MAX_SZ_DEGREE: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HouseRecord {
    pub poly: IntPolynomial,
    pub house: Interval,
    pub is_cyclotomic_product: bool,
    pub is_reciprocal: bool,
    /// House certified strictly greater than one (Kronecker: the
    /// `x`-free part is not a product of cyclotomic polynomials).
    pub above_one: bool,
    /// The house enclosure straddles the ceiling even after exact
    /// re-certification.
    pub boundary: bool,
}

impl HouseRecord {
    fn sort_key(&self) -> Vec<BigInt> {
        self.poly.coeffs().iter().rev().cloned().collect()
    }
}

/// Visits every monic integer polynomial of degree `d` whose house is
/// certified at most `a` (boundary cases flagged), in ascending
/// lexicographic order of `(c_{d−1}, …, c_0)`. Returns the number visited.
pub fn enumerate_bounded_house<F: FnMut(HouseRecord)>(d: usize, a: f64, mut sink: F) -> u64 {
    assert!(d >= 1 && a >= 1.0, "need d ≥ 1 and a ≥ 1");
    let b = Bounds::new(d, a);
    let mut s = State::new(d);
    let mut count = 0u64;
    walk::walk(&b, &mut s, 1, &mut |r| {
        count += 1;
        sink(r)
    });
    count
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginResult {
    pub d: usize,
    /// Enclosure of `μ′(d) = min{house(P) − 1 : house(P) > 1}`.
    pub mu_prime: Interval,
    pub argmin: IntPolynomial,
    pub ceiling: f64,
    pub count: u64,
    /// Records whose house straddles the ceiling.
    pub stragglers: Vec<IntPolynomial>,
    pub wall_time_s: f64,
    /// Every visited polynomial, in enumeration order.
    pub records: Vec<HouseRecord>,
}

#[derive(Clone, Debug, Default)]
pub struct SzOptions {
    pub shards: usize,
    pub checkpoint_dir: Option<PathBuf>,
}

/// Default ceiling `2^{1/d}`, padded so that the certified house of
/// `x^d − 2` falls inside it.
pub fn default_ceiling(d: usize) -> f64 {
    2f64.powf(1.0 / d as f64) * (1.0 + 1e-12)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ShardCheckpoint {
    d: usize,
    ceiling: f64,
    shards: usize,
    shard: usize,
    last_prefix: Option<Vec<i64>>,
    done: bool,
    count: u64,
    records: Vec<HouseRecord>,
}

impl ShardCheckpoint {
    fn path(dir: &Path, shard: usize) -> PathBuf {
        dir.join(format!("shard-{shard}.json"))
    }

    fn load(
        dir: &Path,
        d: usize,
        ceiling: f64,
        shards: usize,
        shard: usize,
    ) -> Result<Option<Self>> {
        let path = Self::path(dir, shard);
        if !path.exists() {
            return Ok(None);
        }
        let cp: ShardCheckpoint = serde_json::from_str(&fs::read_to_string(&path)?)?;
        if cp.d != d || cp.ceiling != ceiling || cp.shards != shards || cp.shard != shard {
            return Err(Error::InvalidInput(format!(
                "checkpoint {} belongs to a different run",
                path.display()
            )));
        }
        Ok(Some(cp))
    }

    fn store(&self, dir: &Path) -> Result<()> {
        let path = Self::path(dir, self.shard);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(self)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

/// Top-level prefixes `(c_{d−1})` or `(c_{d−1}, c_{d−2})` owned by `shard`.
fn shard_prefixes(b: &Bounds, shards: usize, shard: usize) -> Vec<Vec<i64>> {
    let d = b.d;
    let mut s = State::new(d);
    let Some((lo, hi)) = level_range(b, &s, 1) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (idx, c1) in (lo..=hi).enumerate() {
        if idx % shards != shard {
            continue;
        }
        set_level(&mut s, 1, c1);
        if d == 1 {
            out.push(vec![c1]);
            continue;
        }
        if let Some((lo2, hi2)) = level_range(b, &s, 2) {
            for c2 in lo2..=hi2 {
                out.push(vec![c1, c2]);
            }
        }
    }
    out
}

fn run_shard(
    b: &Bounds,
    shards: usize,
    shard: usize,
    dir: Option<&Path>,
) -> Result<(u64, Vec<HouseRecord>)> {
    let mut cp = match dir {
        Some(dir) => ShardCheckpoint::load(dir, b.d, b.a, shards, shard)?,
        None => None,
    }
    .unwrap_or(ShardCheckpoint {
        d: b.d,
        ceiling: b.a,
        shards,
        shard,
        last_prefix: None,
        done: false,
        count: 0,
        records: Vec::new(),
    });
    if cp.done {
        return Ok((cp.count, cp.records));
    }
    for prefix in shard_prefixes(b, shards, shard) {
        if cp.last_prefix.as_ref().is_some_and(|last| prefix <= *last) {
            continue;
        }
        let mut s = State::new(b.d);
        for (k, &c) in prefix.iter().enumerate() {
            set_level(&mut s, k + 1, c);
        }
        walk::walk(b, &mut s, prefix.len() + 1, &mut |r| {
            cp.count += 1;
            cp.records.push(r);
        });
        cp.last_prefix = Some(prefix);
        if let Some(dir) = dir {
            cp.store(dir)?;
        }
    }
    cp.done = true;
    if let Some(dir) = dir {
        cp.store(dir)?;
    }
    Ok((cp.count, cp.records))
}

/// Deterministic ordering key for the minimizer: house rounded to 1e-9,
/// then coefficients from the constant term up.
fn argmin_key(r: &HouseRecord) -> (i64, Vec<BigInt>) {
    (
        (r.house.mid() * 1e9).round() as i64,
        r.poly.coeffs().to_vec(),
    )
}

/// `μ′(d)`: the smallest `house(P) − 1` over monic integer `P` of degree
/// `d` with `house(P) > 1`.
pub fn sz_margin(d: usize, tol: f64) -> Result<MarginResult> {
    sz_margin_with(d, tol, &SzOptions::default())
}

pub fn sz_margin_with(d: usize, tol: f64, opts: &SzOptions) -> Result<MarginResult> {
    if d == 0 {
        return Err(Error::DegenerateDegreeZero);
    }
    if d > MAX_SZ_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: d,
            max: MAX_SZ_DEGREE,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let start = Instant::now();
    let ceiling = default_ceiling(d);
    let b = Bounds::new(d, ceiling);
    let shards = opts.shards.max(1);
    if let Some(dir) = &opts.checkpoint_dir {
        fs::create_dir_all(dir)?;
    }
    let parts: Vec<(u64, Vec<HouseRecord>)> = (0..shards)
        .into_par_iter()
        .map(|i| run_shard(&b, shards, i, opts.checkpoint_dir.as_deref()))
        .collect::<Result<_>>()?;
    let count = parts.iter().map(|p| p.0).sum();
    let mut records: Vec<HouseRecord> = parts.into_iter().flat_map(|p| p.1).collect();
    records.sort_by_key(HouseRecord::sort_key);
    let best = records
        .iter()
        .filter(|r| r.above_one)
        .min_by_key(|r| argmin_key(r))
        .ok_or_else(|| Error::SearchFailed("no polynomial with house above one".into()))?;
    let mut house = best.house;
    if house.width() > tol {
        let (_, q) = best.poly.strip_x_power();
        house = certify_roots(&q, ResidualTier::Exact)?.max_modulus();
    }
    if house.width() > tol {
        return Err(Error::ToleranceNotReached {
            width: house.width(),
            tol,
        });
    }
    let mu_prime = Interval::new(
        crate::interval::down(house.lo - 1.0, 1).max(0.0),
        crate::interval::up(house.hi - 1.0, 1),
    );
    Ok(MarginResult {
        d,
        mu_prime,
        argmin: best.poly.clone(),
        ceiling,
        count,
        stragglers: records
            .iter()
            .filter(|r| r.boundary)
            .map(|r| r.poly.clone())
            .collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
        records,
    })
}

/// Companion matrix with `C[i+1][i] = 1` and last column `−c_i`.
pub fn companion_matrix(p: &IntPolynomial) -> Result<IntMatrix> {
    p.require_monic()?;
    let d = p.degree();
    if d == 0 {
        return Err(Error::DegenerateDegreeZero);
    }
    if !p.constant().abs().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let mut m = IntMatrix::zeros(d);
    for i in 0..d {
        if i + 1 < d {
            m.set(i + 1, i, BigInt::one());
        }
        m.set(i, d - 1, -&p.coeffs()[i]);
    }
    Ok(m)
}

/// `x^d P(1/x) = ±P(x)`.
pub fn is_reciprocal(p: &IntPolynomial) -> bool {
    if p.is_zero() {
        return true;
    }
    walk::is_reciprocal_slice(p.coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn degree_one() {
        let mut seen = Vec::new();
        let n = enumerate_bounded_house(1, 1.5, |r| seen.push(r.poly));
        assert_eq!(n, 3);
        assert_eq!(seen, vec![p(&[-1, 1]), p(&[0, 1]), p(&[1, 1])]);
    }

    #[test]
    fn degree_two_contains_x2_minus_2() {
        let mut seen = Vec::new();
        enumerate_bounded_house(2, 2f64.sqrt() * (1.0 + 1e-12), |r| seen.push(r.poly));
        assert!(seen.contains(&p(&[-2, 0, 1])));
    }

    #[test]
    fn margin_degree_two() {
        let r = sz_margin(2, 1e-9).unwrap();
        assert_eq!(r.argmin, p(&[-2, 0, 1]));
        assert!(r.mu_prime.contains(2f64.sqrt() - 1.0));
    }

    #[test]
    fn margin_degree_one() {
        let r = sz_margin(1, 1e-9).unwrap();
        assert_eq!(r.argmin, p(&[-2, 1]));
        assert!(r.mu_prime.contains(1.0));
    }

    #[test]
    fn sharding_is_deterministic() {
        let a = sz_margin_with(
            3,
            1e-9,
            &SzOptions {
                shards: 1,
                checkpoint_dir: None,
            },
        )
        .unwrap();
        let b = sz_margin_with(
            3,
            1e-9,
            &SzOptions {
                shards: 5,
                checkpoint_dir: None,
            },
        )
        .unwrap();
        assert_eq!(a.count, b.count);
        assert_eq!(a.argmin, b.argmin);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn checkpoint_resume() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SzOptions {
            shards: 3,
            checkpoint_dir: Some(dir.path().to_path_buf()),
        };
        let a = sz_margin_with(3, 1e-9, &opts).unwrap();
        assert!(dir.path().join("shard-0.json").exists());
        let b = sz_margin_with(3, 1e-9, &opts).unwrap();
        assert_eq!(a.records, b.records);
        // Roll one shard back to an incomplete state and resume.
        let path = dir.path().join("shard-1.json");
        let mut cp: ShardCheckpoint =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        cp.done = false;
        cp.last_prefix = None;
        cp.count = 0;
        cp.records.clear();
        fs::write(&path, serde_json::to_vec(&cp).unwrap()).unwrap();
        let c = sz_margin_with(3, 1e-9, &opts).unwrap();
        assert_eq!(a.records, c.records);
    }

    #[test]
    fn companion_examples() {
        assert_eq!(
            companion_matrix(&p(&[-1, 1])).unwrap(),
            IntMatrix::from_i64(&[[1]])
        );
        let c = companion_matrix(&p(&[1, -3, 1])).unwrap();
        assert_eq!(c, IntMatrix::from_i64(&[[0, -1], [1, 3]]));
        assert_eq!(c.det(), BigInt::one());
        assert!(matches!(
            companion_matrix(&p(&[-2, 0, 1])),
            Err(Error::NonUnitConstantTerm)
        ));
    }

    #[test]
    fn reciprocal_examples() {
        assert!(is_reciprocal(&p(&[1, -3, 1])));
        assert!(!is_reciprocal(&p(&[-2, 0, 1])));
        assert!(is_reciprocal(&p(&[-1, 0, 1])));
        for n in 3..=20 {
            assert!(is_reciprocal(&IntPolynomial::cyclotomic(n)), "Φ_{n}");
        }
    }
}
