//! Irreducibility over Z by bounded factor search.
//!
//! A monic factor of degree `k` is the product of `x − λ` over a
//! conjugation-closed set of `k` roots. Each coefficient of that product is
//! enclosed by disc arithmetic on the certified root discs; only the
//! integers inside the enclosures are tried by exact division.

use num_bigint::BigInt;
use num_complex::Complex64;

use super::roots::{certify_roots, ResidualTier};
use crate::error::{Error, Result};
use crate::intcore::IntPolynomial;

/// Largest degree accepted by [`is_irreducible`].
pub const MAX_IRREDUCIBILITY_DEGREE: usize = 16;

const MAX_CANDIDATES: usize = 1 << 16;
const UNIT: f64 = f64::EPSILON * 0.5;

#[derive(Clone, Copy)]
struct Disc {
    c: Complex64,
    r: f64,
}

pub fn is_irreducible(p: &IntPolynomial) -> Result<bool> {
    p.require_monic()?;
    let n = p.degree();
    if n > MAX_IRREDUCIBILITY_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_IRREDUCIBILITY_DEGREE,
        });
    }
    match n {
        0 => return Ok(false),
        1 => return Ok(true),
        _ => {}
    }
    if p.constant() == &BigInt::from(0) || !p.is_square_free() {
        return Ok(false);
    }
    let mut cert = certify_roots(p, ResidualTier::Fast)?;
    if !cert.isolated() {
        cert = certify_roots(p, ResidualTier::Exact)?;
    }
    if !cert.isolated() {
        return Err(Error::CertificationFailed(
            "root discs of a square-free polynomial overlap".into(),
        ));
    }
    let roots: Vec<Disc> = cert
        .roots()
        .iter()
        .map(|r| Disc {
            c: r.center,
            r: r.radius,
        })
        .collect();
    let units = conjugation_units(&roots)?;
    let u = units.len();
    for mask in 1u32..(1u32 << u) {
        let size: usize = (0..u)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| units[i].len())
            .sum();
        if size > n / 2 {
            continue;
        }
        let chosen: Vec<Disc> = (0..u)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| units[i].iter().map(|&j| roots[j]))
            .collect();
        if has_integer_factor(p, &chosen)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Groups roots into real singletons and complex-conjugate pairs.
fn conjugation_units(roots: &[Disc]) -> Result<Vec<Vec<usize>>> {
    let n = roots.len();
    let mut used = vec![false; n];
    let mut units = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let conj = roots[i].c.conj();
        let hits: Vec<usize> = (0..n)
            .filter(|&j| (roots[j].c - conj).norm() <= roots[i].r + roots[j].r)
            .collect();
        if hits.len() != 1 {
            return Err(Error::CertificationFailed(
                "cannot pair roots with their conjugates".into(),
            ));
        }
        let j = hits[0];
        used[i] = true;
        used[j] = true;
        units.push(if i == j { vec![i] } else { vec![i, j] });
    }
    Ok(units)
}

fn has_integer_factor(p: &IntPolynomial, chosen: &[Disc]) -> Result<bool> {
    let mut coef = vec![Disc {
        c: Complex64::new(1.0, 0.0),
        r: 0.0,
    }];
    for z in chosen {
        let mut next = vec![
            Disc {
                c: Complex64::new(0.0, 0.0),
                r: 0.0,
            };
            coef.len() + 1
        ];
        for j in 0..next.len() {
            let hi = if j >= 1 { Some(coef[j - 1]) } else { None };
            let lo = coef.get(j).copied();
            let mut c = Complex64::new(0.0, 0.0);
            let mut r = 0.0;
            let mut mag = 0.0;
            if let Some(h) = hi {
                c += h.c;
                r += h.r;
                mag += h.c.norm();
            }
            if let Some(l) = lo {
                c -= z.c * l.c;
                r += z.c.norm() * l.r + z.r * (l.c.norm() + l.r);
                mag += z.c.norm() * l.c.norm();
            }
            r += 8.0 * UNIT * mag;
            next[j] = Disc {
                c,
                r: r * (1.0 + 8.0 * UNIT),
            };
        }
        coef = next;
    }
    let k = coef.len() - 1;
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(k);
    let mut total: usize = 1;
    for d in &coef[..k] {
        if d.c.im.abs() > d.r {
            return Ok(false);
        }
        let lo = (d.c.re - d.r).ceil();
        let hi = (d.c.re + d.r).floor();
        if lo > hi {
            return Ok(false);
        }
        if lo.abs() > 9e15 || hi.abs() > 9e15 {
            return Err(Error::CertificationFailed(
                "factor coefficient out of range".into(),
            ));
        }
        let span = (hi - lo) as usize + 1;
        total = total.saturating_mul(span);
        if total > MAX_CANDIDATES {
            return Err(Error::CertificationFailed(
                "too many factor candidates; root enclosures too wide".into(),
            ));
        }
        ranges.push((lo as i64, hi as i64));
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let mut c: Vec<BigInt> = cur.iter().map(|&v| BigInt::from(v)).collect();
        c.push(BigInt::from(1));
        if p.exact_div_monic(&IntPolynomial::new(c)).is_some() {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(false);
            }
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn examples() {
        assert!(!is_irreducible(&p(&[-1, 0, 1])).unwrap());
        assert!(is_irreducible(&p(&[1, 1, 1, 1, 1])).unwrap());
        assert!(is_irreducible(&p(&[-1, -1, 1])).unwrap());
    }

    #[test]
    fn quartic_products_of_quadratics() {
        // (x² + x + 2)(x² − 3x + 5)
        let f = p(&[2, 1, 1]).mul(&p(&[5, -3, 1]));
        assert!(!is_irreducible(&f).unwrap());
        // x⁴ + 1 is irreducible over Z
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])).unwrap());
    }

    #[test]
    fn example_char_poly_is_irreducible() {
        let cp = crate::intcore::example_n().char_poly();
        assert!(is_irreducible(&cp).unwrap());
    }

    #[test]
    fn degree_bound() {
        let mut c = vec![0i64; 18];
        c[0] = 1;
        c[17] = 1;
        assert!(matches!(
            is_irreducible(&p(&c)),
            Err(Error::DegreeTooLarge { .. })
        ));
    }
}
