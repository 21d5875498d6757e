//! Exact dyadic views of `f64` values.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// `(m, e)` with `x = m·2^e` exactly.
pub(crate) fn dyadic(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, e) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp_bits - 1075)
    };
    (BigInt::from(sign) * BigInt::from(mant), e)
}

/// `log2|x|` accurate to a few ulps, or `None` for zero.
pub(crate) fn bigint_abs_log2(x: &BigInt) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    let drop = bits.saturating_sub(64);
    let top = (x.abs() >> drop).to_f64().expect("fits");
    Some(top.log2() + drop as f64)
}

/// `ln⟨x, k⟩` for a dyadic real vector `x` and an integer vector `k`, with
/// the pairing evaluated exactly; `None` unless the pairing is positive.
pub(crate) fn ln_positive_pairing(x: &[f64], k: &[BigInt]) -> Option<f64> {
    let parts: Vec<(BigInt, i64)> = x.iter().map(|&v| dyadic(v)).collect();
    let e = parts
        .iter()
        .filter(|(m, _)| !m.is_zero())
        .map(|(_, e)| *e)
        .min()
        .unwrap_or(0);
    let mut s = BigInt::zero();
    for ((m, ei), ki) in parts.iter().zip(k) {
        if !m.is_zero() {
            s += (m * ki) << ((ei - e) as usize);
        }
    }
    if !s.is_positive() {
        return None;
    }
    Some((bigint_abs_log2(&s)? + e as f64) * std::f64::consts::LN_2)
}
