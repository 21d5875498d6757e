//! Depth-first walk over monic integer polynomials with bounded house.
//!
//! Writing `P = x^d − e_1 x^{d−1} + e_2 x^{d−2} − … + (−1)^d e_d`, a root
//! bound `a` gives `|e_k| ≤ C(d,k)·a^k` and `|p_n| ≤ d·a^n` for the power
//! sums `p_n`. Newton's identity makes `p_k` affine in `e_k` once
//! `e_1, …, e_{k−1}` are fixed, so both bounds cut the range of `e_k` at
//! each level. Leaves are screened with further power sums before any root
//! is computed.

use num_bigint::BigInt;

use super::HouseRecord;
use crate::intcore::IntPolynomial;
use crate::interval::Interval;
use crate::spectra::{certify_roots, is_cyclotomic_product, ResidualTier};

const PAD: f64 = 1.0 + 1e-9;

pub(crate) struct Bounds {
    pub d: usize,
    pub a: f64,
    binom: Vec<f64>,
    power: Vec<f64>,
}

impl Bounds {
    pub fn new(d: usize, a: f64) -> Self {
        let mut binom = vec![0.0; d + 1];
        let mut c = 1.0f64;
        for (k, b) in binom.iter_mut().enumerate() {
            *b = c * a.powi(k as i32) * PAD;
            c = c * (d - k) as f64 / (k + 1) as f64;
        }
        let power = (0..=3 * d)
            .map(|n| d as f64 * a.powi(n as i32) * PAD)
            .collect();
        Bounds { d, a, binom, power }
    }
}

/// Walk state: `e[k]` and power sums `p[k]`, both 1-indexed with
/// `p[0] = d`.
pub(crate) struct State {
    e: Vec<i64>,
    p: Vec<i128>,
}

impl State {
    pub fn new(d: usize) -> Self {
        let mut p = vec![0i128; d + 1];
        p[0] = d as i128;
        State {
            e: vec![0; d + 1],
            p,
        }
    }

    /// Coefficients low to high.
    pub fn coeffs(&self, d: usize) -> Vec<i64> {
        let mut c = vec![0i64; d + 1];
        c[d] = 1;
        for k in 1..=d {
            c[d - k] = if k % 2 == 0 { self.e[k] } else { -self.e[k] };
        }
        c
    }
}

/// Range of the coefficient `c_{d−k}` allowed at level `k`, in ascending
/// order, or `None` when empty.
pub(crate) fn level_range(b: &Bounds, s: &State, k: usize) -> Option<(i64, i64)> {
    let mut acc: i128 = 0;
    for i in 1..k {
        let t = s.e[i] as i128 * s.p[k - i];
        acc += if i % 2 == 1 { t } else { -t };
    }
    // p_k = acc + sign·k·e_k with sign = (−1)^{k−1}.
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let bound = b.power[k];
    let kf = k as f64;
    let (x, y) = (
        sign * (-bound - acc as f64) / kf,
        sign * (bound - acc as f64) / kf,
    );
    let lo_e = x.min(y).max(-b.binom[k]).ceil();
    let hi_e = x.max(y).min(b.binom[k]).floor();
    if lo_e > hi_e {
        return None;
    }
    // c_{d−k} = (−1)^k e_k.
    let (lo_e, hi_e) = (lo_e as i64, hi_e as i64);
    Some(if k % 2 == 0 {
        (lo_e, hi_e)
    } else {
        (-hi_e, -lo_e)
    })
}

/// Fixes `c_{d−k} = c` and updates `p_k`.
pub(crate) fn set_level(s: &mut State, k: usize, c: i64) {
    let e = if k % 2 == 0 { c } else { -c };
    s.e[k] = e;
    let mut acc: i128 = 0;
    for i in 1..k {
        let t = s.e[i] as i128 * s.p[k - i];
        acc += if i % 2 == 1 { t } else { -t };
    }
    let t = k as i128 * e as i128;
    s.p[k] = acc + if k % 2 == 1 { t } else { -t };
}

/// Higher power sums `p_{d+1}, …, p_{3d}` stay bounded by `d·a^n`.
fn leaf_screen(b: &Bounds, s: &State) -> bool {
    let d = b.d;
    let mut p: Vec<i128> = s.p.clone();
    for n in d + 1..=3 * d {
        let mut v: i128 = 0;
        for i in 1..=d {
            let t = s.e[i] as i128 * p[n - i];
            v += if i % 2 == 1 { t } else { -t };
        }
        if (v as f64).abs() > b.power[n] {
            return false;
        }
        p.push(v);
    }
    true
}

/// Walks every completion of the levels `from..=d`, calling `emit` on each
/// accepted leaf in ascending coefficient order.
pub(crate) fn walk<F: FnMut(HouseRecord)>(b: &Bounds, s: &mut State, from: usize, emit: &mut F) {
    if from > b.d {
        if leaf_screen(b, s) {
            if let Some(r) = certify_leaf(&s.coeffs(b.d), b.a) {
                emit(r);
            }
        }
        return;
    }
    let Some((lo, hi)) = level_range(b, s, from) else {
        return;
    };
    for c in lo..=hi {
        set_level(s, from, c);
        walk(b, s, from + 1, emit);
    }
}

pub(crate) fn is_reciprocal_slice<T: PartialEq + std::ops::Neg<Output = T> + Clone>(
    c: &[T],
) -> bool {
    let rev: Vec<T> = c.iter().rev().cloned().collect();
    rev == c || rev.iter().zip(c).all(|(r, x)| *r == -x.clone())
}

/// Certifies the house of one polynomial against the ceiling `a`.
pub(crate) fn certify_leaf(c: &[i64], a: f64) -> Option<HouseRecord> {
    let poly = IntPolynomial::new(c.iter().map(|&v| BigInt::from(v)).collect());
    let reciprocal = is_reciprocal_slice(c);
    let (_, q) = poly.strip_x_power();
    let full_cyclotomic = c[0] != 0 && is_cyclotomic_product(&poly).unwrap_or(false);
    let q_trivial = q.degree() == 0;
    let q_cyclotomic = q_trivial || is_cyclotomic_product(&q).unwrap_or(false);
    if q_cyclotomic {
        let house = if q_trivial {
            Interval::point(0.0)
        } else {
            Interval::point(1.0)
        };
        if house.hi > a {
            return None;
        }
        return Some(HouseRecord {
            poly,
            house,
            is_cyclotomic_product: full_cyclotomic,
            is_reciprocal: reciprocal,
            above_one: false,
            boundary: false,
        });
    }
    let mut house = certify_roots(&q, ResidualTier::Fast).ok()?.max_modulus();
    if house.lo <= a && house.hi > a {
        house = certify_roots(&q, ResidualTier::Exact).ok()?.max_modulus();
    }
    if house.lo > a {
        return None;
    }
    Some(HouseRecord {
        poly,
        house,
        is_cyclotomic_product: false,
        is_reciprocal: reciprocal,
        above_one: true,
        boundary: house.hi > a,
    })
}
