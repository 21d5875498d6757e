//! Certified root enclosures for monic integer polynomials.
//!
//! Roots are approximated by Aberth iteration in `f64` and then certified by
//! Weierstrass discs: for a square-free monic `F` of degree `n` with
//! pairwise distinct approximations `z_i`, every root lies in the union of
//! the discs `D(z_i, n·|W_i|)`, `W_i = F(z_i)/∏_{j≠i}(z_i − z_j)`, and each
//! connected component made of `k` discs holds exactly `k` roots.
//! Repeated roots are handled by Yun's square-free decomposition, and the
//! residuals `|F(z_i)|` are bounded either by a running error estimate of
//! Horner's rule or by exact evaluation at the dyadic centre.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{bigint_abs_log2, dyadic};
use crate::error::{Error, Result};
use crate::intcore::IntPolynomial;
use crate::interval::{down, up, Interval};

const UNIT: f64 = f64::EPSILON * 0.5;
const MAX_ITER: usize = 2000;

/// How residuals are bounded during certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualTier {
    /// `f64` Horner plus an a-priori rounding bound.
    Fast,
    /// Exact big-integer evaluation at the dyadic centre.
    Exact,
}

/// An approximate root with a disc guaranteed to meet the true root set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedRoot {
    pub center: Complex64,
    pub radius: f64,
    pub multiplicity: usize,
    /// Connected component label; discs sharing a label may swap roots.
    pub component: usize,
}

#[derive(Clone, Debug)]
pub struct RootCertificate {
    roots: Vec<CertifiedRoot>,
}

impl RootCertificate {
    pub fn roots(&self) -> &[CertifiedRoot] {
        &self.roots
    }

    /// Enclosure of the maximal root modulus.
    pub fn max_modulus(&self) -> Interval {
        if self.roots.is_empty() {
            return Interval::point(0.0);
        }
        let hi = self
            .roots
            .iter()
            .map(|r| up(r.center.norm() + r.radius, 2))
            .fold(0.0, f64::max);
        let mut comps: Vec<usize> = self.roots.iter().map(|r| r.component).collect();
        comps.sort_unstable();
        comps.dedup();
        let lo = comps
            .iter()
            .map(|&c| {
                self.roots
                    .iter()
                    .filter(|r| r.component == c)
                    .map(|r| down(r.center.norm() - r.radius, 2))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
            .max(0.0);
        Interval::new(lo.min(hi), hi)
    }

    /// True when every disc is its own component.
    pub fn isolated(&self) -> bool {
        let mut comps: Vec<usize> = self.roots.iter().map(|r| r.component).collect();
        comps.sort_unstable();
        comps.dedup();
        comps.len() == self.roots.len()
    }
}

/// Yun's square-free decomposition `Q = ∏ F_i^i` of a monic polynomial.
pub(crate) fn square_free_decomposition(q: &IntPolynomial) -> Vec<(IntPolynomial, usize)> {
    let mut out = Vec::new();
    if q.degree() == 0 {
        return out;
    }
    let d = q.derivative();
    let a0 = q.gcd(&d);
    let mut b = q.exact_div_monic(&a0).expect("gcd divides");
    let c = d.div_rem_monic(&a0).0;
    let mut dd = sub(&c, &b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&dd);
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        let nb = b.exact_div_monic(&a).expect("gcd divides");
        let nc = dd.div_rem_monic(&a).0;
        dd = sub(&nc, &nb.derivative());
        b = nb;
        i += 1;
    }
    out
}

fn sub(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let n = a.coeffs().len().max(b.coeffs().len());
    let z = BigInt::zero();
    IntPolynomial::new(
        (0..n)
            .map(|i| a.coeffs().get(i).unwrap_or(&z) - b.coeffs().get(i).unwrap_or(&z))
            .collect(),
    )
}

/// Certifies all roots of the monic polynomial `p`, with multiplicity.
pub fn certify_roots(p: &IntPolynomial, tier: ResidualTier) -> Result<RootCertificate> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::DegenerateDegreeZero);
    }
    p.require_monic()?;
    let (v, q) = p.strip_x_power();
    let mut roots = Vec::new();
    let mut next_component = 0;
    if v > 0 {
        roots.push(CertifiedRoot {
            center: Complex64::new(0.0, 0.0),
            radius: 0.0,
            multiplicity: v,
            component: next_component,
        });
        next_component += 1;
    }
    for (f, mult) in square_free_decomposition(&q) {
        let mut part = certify_square_free(&f, tier)?;
        for r in &mut part {
            r.multiplicity = mult;
            r.component += next_component;
        }
        next_component += part.len();
        roots.extend(part);
    }
    Ok(RootCertificate { roots })
}

/// Certified enclosure of the maximal root modulus of `p`, of width at most
/// `tol`.
pub fn root_radius(p: &IntPolynomial, tol: f64) -> Result<Interval> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut enc = certify_roots(p, ResidualTier::Fast)?.max_modulus();
    if enc.width() > tol {
        enc = certify_roots(p, ResidualTier::Exact)?.max_modulus();
    }
    if enc.width() > tol {
        return Err(Error::ToleranceNotReached {
            width: enc.width(),
            tol,
        });
    }
    Ok(enc)
}

/// `x^n P(1/x)` normalized to be monic; requires `P(0) = ±1`.
pub(crate) fn monic_reversal(p: &IntPolynomial) -> Result<IntPolynomial> {
    let c0 = p.constant();
    if c0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    if !c0.abs().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let r = p.reversed();
    Ok(if r.leading().is_negative() {
        r.neg()
    } else {
        r
    })
}

fn certify_square_free(f: &IntPolynomial, tier: ResidualTier) -> Result<Vec<CertifiedRoot>> {
    let n = f.degree();
    let coeffs = f.to_f64();
    let z = aberth(&coeffs);
    let radii = weierstrass_radii(f, &coeffs, &z, tier);
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let gap = (z[i] - z[j]).norm();
            if !(gap * (1.0 - 4.0 * UNIT) > radii[i] + radii[j]) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut labels: Vec<usize> = (0..n).map(|i| find(&mut comp, i)).collect();
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for l in &mut labels {
        *l = distinct.binary_search(l).expect("label present");
    }
    Ok((0..n)
        .map(|i| CertifiedRoot {
            center: z[i],
            radius: radii[i],
            multiplicity: 1,
            component: labels[i],
        })
        .collect())
}

fn weierstrass_radii(
    f: &IntPolynomial,
    coeffs: &[f64],
    z: &[Complex64],
    tier: ResidualTier,
) -> Vec<f64> {
    let n = z.len();
    (0..n)
        .map(|i| {
            let residual = match tier {
                ResidualTier::Fast => horner_residual_bound(coeffs, z[i]),
                ResidualTier::Exact => exact_residual_bound(f, z[i]),
            };
            if residual == 0.0 {
                return 0.0;
            }
            // Lower bound for ∏|z_i − z_j|, tracked in log form against
            // overflow.
            let mut log_den = 0.0;
            for j in 0..n {
                if j != i {
                    let d = (z[i] - z[j]).norm();
                    if d == 0.0 {
                        return f64::INFINITY;
                    }
                    log_den += d.ln();
                }
            }
            let slack = 1.0 + (4 * n + 8) as f64 * UNIT + 1e-12;
            let r = (residual.ln() - log_den).exp() * n as f64 * slack;
            up(r, 2)
        })
        .collect()
}

/// `|F(z)|` plus a bound on the Horner rounding error.
fn horner_residual_bound(coeffs: &[f64], z: Complex64) -> f64 {
    let n = coeffs.len() - 1;
    let az = z.norm();
    let mut s = Complex64::new(coeffs[n], 0.0);
    let mut m = coeffs[n].abs();
    for k in (0..n).rev() {
        s = s * z + coeffs[k];
        m = m * az + coeffs[k].abs();
    }
    let err = 8.0 * (n as f64 + 2.0) * UNIT * m;
    up(s.norm() + err, 2)
}

/// `|F(z)|`, rounded upward, with `F(z)` evaluated exactly in the Gaussian
/// dyadic rationals.
pub(crate) fn exact_residual_bound(f: &IntPolynomial, z: Complex64) -> f64 {
    let (mut a, ea) = dyadic(z.re);
    let (mut b, eb) = dyadic(z.im);
    let mut e = if a.is_zero() {
        eb
    } else if b.is_zero() {
        ea
    } else {
        ea.min(eb)
    };
    if e > 0 {
        if !a.is_zero() {
            a <<= ea as usize;
        }
        if !b.is_zero() {
            b <<= eb as usize;
        }
        e = 0;
    } else {
        if !a.is_zero() {
            a <<= (ea - e) as usize;
        }
        if !b.is_zero() {
            b <<= (eb - e) as usize;
        }
    }
    // z = (a + bi)·2^e with e ≤ 0; F(z)·2^{-e·n} = Σ c_k (a+bi)^k 2^{-e(n-k)}.
    let c = f.coeffs();
    let n = c.len() - 1;
    let shift = (-e) as usize;
    let mut sr = c[n].clone();
    let mut si = BigInt::zero();
    for k in (0..n).rev() {
        let nr = &sr * &a - &si * &b;
        let ni = &sr * &b + &si * &a;
        sr = nr + (&c[k] << (shift * (n - k)));
        si = ni;
    }
    let scale = e * n as i64;
    let re = bigint_abs_log2(&sr);
    let im = bigint_abs_log2(&si);
    let combined = match (re, im) {
        (None, None) => return 0.0,
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => {
            let hi = x.max(y);
            let lo = x.min(y);
            hi + (1.0 + (lo - hi).exp2()).log2()
        }
    };
    let v = (combined + scale as f64).exp2();
    up(v * (1.0 + 16.0 * UNIT), 2)
}

/// Initial guesses on circles read off the Newton polygon of `|c_k|`.
fn initial_guesses(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| (k, v.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut z = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (ka, ya) = w[0];
        let (kb, yb) = w[1];
        let cnt = kb - ka;
        let r = ((ya - yb) / cnt as f64).exp();
        for i in 0..cnt {
            let theta = std::f64::consts::TAU * i as f64 / cnt as f64
                + std::f64::consts::TAU * ka as f64 / n as f64
                + 0.4;
            z.push(Complex64::from_polar(r, theta));
        }
    }
    z
}

/// `F(z)/F'(z)`, using the reversed polynomial when `|z| > 1`.
fn newton_ratio(c: &[f64], z: Complex64) -> Complex64 {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(c[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        p / dp
    } else {
        let y = z.inv();
        let mut r = Complex64::new(c[0], 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            dr = dr * y + r;
            r = r * y + c[k];
        }
        z * r / (r * n as f64 - y * dr)
    }
}

/// Aberth–Ehrlich simultaneous iteration.
pub(crate) fn aberth(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let mut z = initial_guesses(c);
    let mut converged = vec![false; n];
    let mut extra = 2;
    for _ in 0..MAX_ITER {
        for i in 0..n {
            if converged[i] && extra == 0 {
                continue;
            }
            let ratio = newton_ratio(c, z[i]);
            if !ratio.is_finite() {
                converged[i] = true;
                continue;
            }
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
            }
            converged[i] = w.norm() <= 4.0 * UNIT * z[i].norm() || !w.is_finite();
        }
        if converged.iter().all(|&b| b) {
            if extra == 0 {
                break;
            }
            extra -= 1;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn gaussian_roots_have_modulus_one() {
        let e = root_radius(&p(&[1, 0, 1]), 1e-12).unwrap();
        assert!(e.contains(1.0));
    }

    #[test]
    fn x_d_minus_two() {
        for d in 1..=12 {
            let mut c = vec![0i64; d + 1];
            c[0] = -2;
            c[d] = 1;
            let e = root_radius(&p(&c), 1e-10).unwrap();
            let truth = 2f64.powf(1.0 / d as f64);
            assert!(e.lo <= truth && truth <= e.hi, "d={d}: {e}");
        }
    }

    #[test]
    fn golden_ratio() {
        let e = root_radius(&p(&[-1, -1, 1]), 1e-10).unwrap();
        assert!((e.mid() - 1.618_033_988_7).abs() < 1e-10);
    }

    #[test]
    fn multiple_roots_are_certified() {
        // (x − 1)^3 (x + 2)^2
        let f = p(&[1, -1]).neg();
        let g = p(&[2, 1]);
        let q = f.mul(&f).mul(&f).mul(&g).mul(&g);
        let cert = certify_roots(&q, ResidualTier::Fast).unwrap();
        let mult: usize = cert.roots().iter().map(|r| r.multiplicity).sum();
        assert_eq!(mult, 5);
        assert!(cert.max_modulus().contains(2.0));
    }

    #[test]
    fn zero_roots_stripped() {
        let cert = certify_roots(&p(&[0, 0, -4, 0, 1]), ResidualTier::Fast).unwrap();
        assert!(cert.max_modulus().contains(2.0));
    }

    #[test]
    fn exact_tier_is_not_looser_than_needed() {
        let q = p(&[-2, 0, 0, 0, 0, 0, 0, 0, 1]);
        let e = certify_roots(&q, ResidualTier::Exact)
            .unwrap()
            .max_modulus();
        assert!(e.contains(2f64.powf(0.125)));
        assert!(e.width() < 1e-12);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(matches!(
            root_radius(&IntPolynomial::one(), 1e-9),
            Err(Error::DegenerateDegreeZero)
        ));
    }

    #[test]
    fn wide_root_spread() {
        // Char poly of N², roots spanning ~1e-2 .. ~40.
        let n = crate::intcore::example_n();
        let cp = n.mul(&n).char_poly();
        let e = root_radius(&cp, 1e-9).unwrap();
        assert!((e.mid() - 6.2335f64.powi(2)).abs() < 0.05);
    }

    #[test]
    fn yun_decomposition() {
        let a = p(&[-1, 1]);
        let b = p(&[1, 0, 1]);
        let q = a.mul(&b).mul(&b).mul(&b);
        let dec = square_free_decomposition(&q);
        assert_eq!(dec, vec![(a, 1), (b, 3)]);
    }
}
