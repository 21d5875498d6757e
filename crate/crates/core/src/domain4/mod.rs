//! A bounded Stein Reinhardt domain in `(C*)^4` invariant under a matrix
//! with non-real spectrum.
//!
//! For `N ∈ GL_4(Z)` with two positive real eigenvalues `α₁ > 1 > α₂` whose
//! eigenvectors lie in the negative orthant, and a complex pair `ω, ω̄`, the
//! orbit `u_j = N^j u` of a seed `u = a₁v₁ + a₂v₂ + a′w′ + a″w″` with
//! `a₁, a₂ > 0` eventually stays in the negative orthant in both
//! directions. The convex hull of `{u_{(2j+1)J+k}}` is then invariant under
//! `N^{2J}` and its logarithmic preimage is the domain.

mod lp;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intcore::{point_action, ComplexPoint, IntMatrix, LatticeVector};
use crate::interval::Interval;
use crate::spectra::linalg::{self, to_complex};
use crate::spectra::spectral_profile;

/// The seed vector of the worked example.
pub fn example_seed() -> LatticeVector {
    LatticeVector::from_i64(&[-14, -43, -62, -63])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    pub alpha1: Interval,
    pub alpha2: Interval,
    /// `ω = re + i·im` with `im > 0`, and its certified error radius.
    pub omega: [f64; 2],
    pub omega_radius: f64,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    /// `w′ = Re v_ω`, `w″ = Im v_ω`; `N` acts on their span as `|ω|` times
    /// a rotation.
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    /// `‖Nv − λv‖∞` for `v₁`, `v₂` and the complex eigenvector.
    pub residuals: [f64; 3],
}

impl EigenFrame {
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.omega[0], self.omega[1])
    }
}

fn real_unit_vector(v: &[Complex64]) -> Vec<f64> {
    let pivot = v
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let mut r: Vec<f64> = v.iter().map(|z| (z * phase).re).collect();
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if r.iter().sum::<f64>() > 0.0 {
        -1.0
    } else {
        1.0
    };
    for x in &mut r {
        *x *= sign / norm;
    }
    r
}

/// Eigenframe of a 4×4 matrix with spectrum `{α₁, α₂, ω, ω̄}`.
pub fn eigen_frame(n: &IntMatrix, tol: f64) -> Result<EigenFrame> {
    if n.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: n.dim(),
        });
    }
    let profile = spectral_profile(n, 1e-9)?;
    let roots = &profile.roots;
    let (real, complex): (Vec<&crate::spectra::RootRecord>, Vec<_>) =
        roots.iter().partition(|r| r.im.abs() <= r.rad);
    if real.len() != 2 || complex.len() != 2 || roots.iter().any(|r| r.mult != 1) {
        return Err(Error::SpectrumShapeMismatch(format!(
            "expected two simple real eigenvalues and one complex pair, got {} real and {} non-real",
            real.len(),
            complex.len()
        )));
    }
    let (hi, lo) = if real[0].re > real[1].re {
        (real[0], real[1])
    } else {
        (real[1], real[0])
    };
    let om = if complex[0].im > 0.0 {
        complex[0]
    } else {
        complex[1]
    };
    let a = to_complex(&n.to_f64());
    let alpha1 = Complex64::new(hi.re, 0.0);
    let alpha2 = Complex64::new(lo.re, 0.0);
    let omega = Complex64::new(om.re, om.im);
    let v1 = real_unit_vector(&linalg::eigenvector(&a, alpha1)?);
    let v2 = real_unit_vector(&linalg::eigenvector(&a, alpha2)?);
    let vw = linalg::eigenvector(&a, omega)?;
    let w1: Vec<f64> = vw.iter().map(|z| z.re).collect();
    let w2: Vec<f64> = vw.iter().map(|z| z.im).collect();
    let cplx = |v: &[f64]| {
        v.iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>()
    };
    let residuals = [
        linalg::residual(&a, alpha1, &cplx(&v1)),
        linalg::residual(&a, alpha2, &cplx(&v2)),
        linalg::residual(&a, omega, &vw),
    ];
    if residuals.iter().any(|r| !(*r <= tol)) {
        return Err(Error::CertificationFailed(format!(
            "eigenvector residuals {residuals:?} exceed {tol}"
        )));
    }
    for (name, v) in [("v1", &v1), ("v2", &v2)] {
        if v.iter().any(|x| !(*x < 0.0)) {
            return Err(Error::HypothesisViolated(format!(
                "{name} = {v:?} is not in an open orthant"
            )));
        }
    }
    Ok(EigenFrame {
        alpha1: Interval::new(hi.re - hi.rad, hi.re + hi.rad),
        alpha2: Interval::new(lo.re - lo.rad, lo.re + lo.rad),
        omega: [om.re, om.im],
        omega_radius: om.rad,
        v1,
        v2,
        w1,
        w2,
        residuals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedDecomposition {
    pub a1: f64,
    pub a2: f64,
    pub a_prime: f64,
    pub a_double_prime: f64,
    pub residual: f64,
    /// `‖B‖∞·‖B⁻¹‖∞` for the frame matrix `B = [v₁ v₂ w′ w″]`.
    pub condition: f64,
    pub a1_positive: bool,
    pub a2_positive: bool,
}

const MAX_CONDITION: f64 = 1e10;

fn frame_matrix(frame: &EigenFrame) -> Vec<Vec<f64>> {
    (0..4)
        .map(|i| vec![frame.v1[i], frame.v2[i], frame.w1[i], frame.w2[i]])
        .collect()
}

/// Coordinates of a real vector in the eigenframe.
pub fn decompose_vector(x: &[f64], frame: &EigenFrame) -> Result<SeedDecomposition> {
    let b = frame_matrix(frame);
    let bc = to_complex(&b);
    let solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let r: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(linalg::solve(&bc, &r)?.iter().map(|z| z.re).collect())
    };
    let inv_cols: Vec<Vec<f64>> = (0..4)
        .map(|j| {
            let mut e = vec![0.0; 4];
            e[j] = 1.0;
            solve(&e)
        })
        .collect::<Result<_>>()?;
    let norm_b = b
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let norm_inv = (0..4)
        .map(|i| inv_cols.iter().map(|c| c[i].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let condition = norm_b * norm_inv;
    if !(condition.is_finite() && condition < MAX_CONDITION) {
        return Err(Error::IllConditionedFrame(condition));
    }
    let a = solve(x)?;
    let residual = (0..4)
        .map(|i| (b[i].iter().zip(&a).map(|(p, q)| p * q).sum::<f64>() - x[i]).abs())
        .fold(0.0, f64::max);
    Ok(SeedDecomposition {
        a1: a[0],
        a2: a[1],
        a_prime: a[2],
        a_double_prime: a[3],
        residual,
        condition,
        a1_positive: a[0] > 0.0,
        a2_positive: a[1] > 0.0,
    })
}

pub fn decompose_seed(u: &LatticeVector, frame: &EigenFrame) -> Result<SeedDecomposition> {
    decompose_vector(&u.to_f64(), frame)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JCertificate {
    pub j: u64,
    /// Smallest `t` from which both tail inequalities hold.
    pub tail_start: u64,
    /// `|j|` range checked by exact integer iteration.
    pub exact_horizon: u64,
    /// Indices in the exact range where `u_j` leaves the open negative
    /// orthant.
    pub exceptional: Vec<i64>,
    /// Bound `‖w_j‖∞ ≤ C·|ω|^j` on the rotating component.
    pub c: f64,
    /// Ratios (dominant term)/(rest) at `t = tail_start`; ≥ the required
    /// safety factor.
    pub forward_ratio: f64,
    pub backward_ratio: f64,
    pub safety_factor: f64,
    pub decomposition: SeedDecomposition,
}

const SAFETY: f64 = 2.0;
const MIN_EXACT_HORIZON: u64 = 200;

fn strictly_negative(v: &LatticeVector) -> bool {
    v.entries().iter().all(|x| x.is_negative())
}

/// `u_j = N^j u` for `j ∈ [−h, h]`, indexed by `j + h`.
pub fn orbit(n: &IntMatrix, u: &LatticeVector, h: u64) -> Result<Vec<LatticeVector>> {
    let inv = n.inverse_unimodular()?;
    let mut fwd = vec![u.clone()];
    let mut bwd = vec![u.clone()];
    for _ in 0..h {
        let f = fwd.last().expect("non-empty").applied_by(n);
        fwd.push(f);
        let b = bwd.last().expect("non-empty").applied_by(&inv);
        bwd.push(b);
    }
    let mut out: Vec<LatticeVector> = bwd.into_iter().skip(1).rev().collect();
    out.extend(fwd);
    Ok(out)
}

/// Smallest `J > 0` such that `u_j` is in the open negative orthant for all
/// `|j| ≥ J − 4`, certified by exact iteration up to a tail index and a
/// dominance bound beyond it.
pub fn find_j(n: &IntMatrix, u: &LatticeVector) -> Result<JCertificate> {
    let frame = eigen_frame(n, 1e-9)?;
    let dec = decompose_seed(u, &frame)?;
    if !(dec.a1_positive && dec.a2_positive) {
        return Err(Error::HypothesisViolated(format!(
            "seed needs a1 > 0 and a2 > 0, got a1 = {}, a2 = {}",
            dec.a1, dec.a2
        )));
    }
    let al1 = frame.alpha1.lo;
    let al2 = frame.alpha2.hi;
    let om = frame.omega().norm();
    if !(al1 > om && om > al2 && al2 > 0.0) {
        return Err(Error::CertificationFailed(format!(
            "need α₁ > |ω| > α₂ > 0, got {al1}, {om}, {al2}"
        )));
    }
    let c = (dec.a_prime.hypot(dec.a_double_prime))
        * (0..4)
            .map(|i| frame.w1[i].hypot(frame.w2[i]))
            .fold(0.0, f64::max);
    let min_neg = |v: &[f64]| v.iter().map(|x| -x).fold(f64::INFINITY, f64::min);
    let sup = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    // Ratios in log form; both are increasing in t.
    let fwd = |t: f64| {
        (t * al1.ln() + (dec.a1 * min_neg(&frame.v1)).ln())
            - (dec.a2 * sup(&frame.v2) * al2.powf(t) + c * om.powf(t)).ln()
    };
    let bwd = |t: f64| {
        (-t * al2.ln() + (dec.a2 * min_neg(&frame.v2)).ln())
            - (dec.a1 * sup(&frame.v1) * al1.powf(-t) + c * om.powf(-t)).ln()
    };
    let need = SAFETY.ln();
    let tail_start = (0..100_000u64)
        .find(|&t| fwd(t as f64) >= need && bwd(t as f64) >= need)
        .ok_or_else(|| Error::CertificationFailed("tail dominance never reached".into()))?;
    let h = tail_start.max(MIN_EXACT_HORIZON);
    let orb = orbit(n, u, h)?;
    let exceptional: Vec<i64> = orb
        .iter()
        .enumerate()
        .filter(|(_, v)| !strictly_negative(v))
        .map(|(i, _)| i as i64 - h as i64)
        .collect();
    let worst = exceptional.iter().map(|j| j.unsigned_abs()).max();
    let j = match worst {
        None => 1,
        Some(w) => w + 5,
    };
    Ok(JCertificate {
        j,
        tail_start,
        exact_horizon: h,
        exceptional,
        c,
        forward_ratio: fwd(tail_start as f64).exp(),
        backward_ratio: bwd(tail_start as f64).exp(),
        safety_factor: SAFETY,
        decomposition: dec,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub j: i64,
    pub k: u8,
    /// Orbit index `(2j+1)J + k`.
    pub index: i64,
    pub point: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogPolytope {
    pub base: IntMatrix,
    pub seed: LatticeVector,
    pub j: u64,
    pub horizon: u64,
    /// `M = N^{2J}`.
    pub invariance_matrix: IntMatrix,
    /// Vertices for |j| ≤ H + 1; the outer ring serves as the target hull
    /// of membership checks.
    pub vertices: Vec<Vertex>,
}

impl LogPolytope {
    /// Distinct vertex points with `|j| ≤ h`.
    pub fn points_within(&self, h: u64) -> Vec<LatticeVector> {
        let mut pts: Vec<LatticeVector> = self
            .vertices
            .iter()
            .filter(|v| v.j.unsigned_abs() <= h)
            .map(|v| v.point.clone())
            .collect();
        pts.sort_by(|a, b| a.entries().cmp(b.entries()));
        pts.dedup();
        pts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeReport {
    /// `M·u_{(2j+1)J+k} = u_{(2j+3)J+k}` on every listed pair.
    pub invariance: bool,
    pub invariance_checked: usize,
    /// Every listed vertex strictly negative.
    pub negativity: bool,
    pub tail: JCertificate,
    /// Affine rank of `{u₀, …, u₄}` and of `N^J·{u₀, …, u₄}`.
    pub affine_rank_b: usize,
    pub affine_rank_b_prime: usize,
    pub rho_m: Interval,
}

/// Rank of an integer matrix, by elimination over the rationals.
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for cc in c..cols {
                    let s = &f * &m[rank][cc];
                    m[r][cc] -= s;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn affine_rank(points: &[LatticeVector]) -> usize {
    let base = &points[0];
    let diffs: Vec<Vec<BigInt>> = points[1..]
        .iter()
        .map(|p| {
            p.entries()
                .iter()
                .zip(base.entries())
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    integer_rank(&diffs)
}

/// Builds the truncated vertex set `{u_{(2j+1)J+k} : |j| ≤ H, k = 0..4}`
/// and certifies invariance, negativity and full dimension.
pub fn build_polytope(
    n: &IntMatrix,
    u: &LatticeVector,
    cert: &JCertificate,
    horizon: u64,
) -> Result<(LogPolytope, PolytopeReport)> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let jj = cert.j as i64;
    let h = horizon as i64;
    let reach = ((2 * h + 3) * jj + 4).unsigned_abs();
    let orb = orbit(n, u, reach)?;
    let at = |idx: i64| orb[(idx + reach as i64) as usize].clone();
    let m = n.pow(2 * cert.j);
    let mut vertices = Vec::new();
    for j in -(h + 1)..=(h + 1) {
        for k in 0..5u8 {
            let index = (2 * j + 1) * jj + k as i64;
            vertices.push(Vertex {
                j,
                k,
                index,
                point: at(index),
            });
        }
    }
    let mut invariance_checked = 0;
    let mut invariance = true;
    for v in vertices.iter().filter(|v| v.j.abs() <= h) {
        let image = v.point.applied_by(&m);
        invariance &= image == at(v.index + 2 * jj);
        invariance_checked += 1;
    }
    let negativity = vertices.iter().all(|v| strictly_negative(&v.point));
    let b: Vec<LatticeVector> = (0..5).map(at).collect();
    let b_prime: Vec<LatticeVector> = (0..5).map(|k| at(jj + k)).collect();
    let affine_rank_b = affine_rank(&b);
    let affine_rank_b_prime = affine_rank(&b_prime);
    if affine_rank_b_prime < 4 {
        return Err(Error::RankDeficient {
            rank: affine_rank_b_prime,
            dim: 4,
        });
    }
    let rho_m = spectral_profile(&m, 1e-6)?.rho;
    let poly = LogPolytope {
        base: n.clone(),
        seed: u.clone(),
        j: cert.j,
        horizon,
        invariance_matrix: m,
        vertices,
    };
    let report = PolytopeReport {
        invariance,
        invariance_checked,
        negativity,
        tail: cert.clone(),
        affine_rank_b,
        affine_rank_b_prime,
        rho_m,
    };
    Ok((poly, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipSample {
    /// Sample point `x`, as floats for display.
    pub x: Vec<f64>,
    pub forward_inside: bool,
    pub backward_inside: bool,
    /// `max_i |log|(M.z)_i| − (Mx)_i/s|` from the multiplicative action on
    /// the rescaled point `log|z| = x/s`.
    pub action_log_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReinhardtReport {
    pub samples: Vec<MembershipSample>,
    pub all_inside: bool,
    pub bounded: bool,
    /// Per-coordinate `[min, max]` over the truncated hull.
    pub bounding_box: Vec<Interval>,
    pub rho_m: Interval,
}

fn to_rational(v: &LatticeVector) -> Vec<BigRational> {
    lp::int_point(v.entries())
}

fn rat_matvec(m: &IntMatrix, x: &[BigRational]) -> Vec<BigRational> {
    m.rows()
        .map(|r| {
            r.iter()
                .zip(x)
                .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                .fold(BigRational::zero(), |s, t| s + t)
        })
        .collect()
}

/// Samples interior points of the `H`-truncated hull, pushes them through
/// `M^{±1}` and confirms by exact linear programming that the images lie in
/// the `(H+1)`-truncated hull.
pub fn verify_reinhardt_instance(
    poly: &LogPolytope,
    samples: usize,
    seed: u64,
) -> Result<ReinhardtReport> {
    let inner = poly.points_within(poly.horizon);
    let outer: Vec<Vec<BigRational>> = poly
        .points_within(poly.horizon + 1)
        .iter()
        .map(to_rational)
        .collect();
    let m = &poly.invariance_matrix;
    let m_inv = m.inverse_unimodular()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples + 1);
    for s in 0..=samples {
        // Sample 0 is the vertex barycentre; the rest are random strictly
        // positive rational weights.
        let weights: Vec<u32> = if s == 0 {
            vec![1; inner.len()]
        } else {
            (0..inner.len()).map(|_| rng.gen_range(1..=1000)).collect()
        };
        let total: u64 = weights.iter().map(|&w| w as u64).sum();
        let x: Vec<BigRational> = (0..4)
            .map(|i| {
                let num: BigInt = inner
                    .iter()
                    .zip(&weights)
                    .map(|(p, &w)| &p.entries()[i] * BigInt::from(w))
                    .sum();
                BigRational::new(num, BigInt::from(total))
            })
            .collect();
        let fwd = rat_matvec(m, &x);
        let bwd = rat_matvec(&m_inv, &x);
        let forward_inside = lp::hull_weights(&outer, &fwd).is_some();
        let backward_inside = lp::hull_weights(&outer, &bwd).is_some();
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        let fwd_f: Vec<f64> = fwd.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        // The log image is linear in x, so the float check runs on x/s with
        // s chosen to keep every modulus inside the f64 range.
        let s = xf.iter().chain(&fwd_f).map(|v| v.abs()).fold(1.0, f64::max) / 200.0;
        let z = ComplexPoint::from_log_moduli(&xf.iter().map(|v| v / s).collect::<Vec<_>>())?;
        let image = point_action(&z, m, 1)?.log_moduli();
        let action_log_error = image
            .iter()
            .zip(&fwd_f)
            .map(|(a, b)| (a - b / s).abs())
            .fold(0.0, f64::max);
        out.push(MembershipSample {
            x: xf,
            forward_inside,
            backward_inside,
            action_log_error,
        });
    }
    let bounding_box: Vec<Interval> = (0..4)
        .map(|i| {
            let vals: Vec<f64> = inner.iter().map(|p| p.to_f64()[i]).collect();
            Interval::new(
                vals.iter().copied().fold(f64::INFINITY, f64::min),
                vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        })
        .collect();
    let bounded = inner.iter().all(strictly_negative);
    let all_inside = out.iter().all(|s| s.forward_inside && s.backward_inside);
    if !all_inside {
        return Err(Error::MembershipFailure(
            "an image of a sampled hull point left the truncated hull".into(),
        ));
    }
    Ok(ReinhardtReport {
        samples: out,
        all_inside,
        bounded,
        bounding_box,
        rho_m: spectral_profile(m, 1e-6)?.rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intcore::example_n;

    #[test]
    fn frame_matches_published_spectrum() {
        let f = eigen_frame(&example_n(), 1e-9).unwrap();
        assert!((f.alpha1.mid() - 6.23).abs() < 0.01);
        assert!((f.alpha2.mid() - 0.27).abs() < 0.01);
        assert!((f.omega[0] + 0.25).abs() < 0.01 && (f.omega[1] - 0.73).abs() < 0.01);
        assert!(f.v1.iter().chain(&f.v2).all(|x| *x < 0.0));
        assert!(f.residuals[0] < 1e-9);
    }

    #[test]
    fn seed_decomposition() {
        let f = eigen_frame(&example_n(), 1e-9).unwrap();
        let d = decompose_seed(&example_seed(), &f).unwrap();
        assert!(d.a1_positive && d.a2_positive);
        assert!(d.residual < 1e-9);
        let e = decompose_vector(&f.v1, &f).unwrap();
        assert!((e.a1 - 1.0).abs() < 1e-9 && e.a2.abs() < 1e-9);
    }

    #[test]
    fn rank_of_identity_rows() {
        let rows: Vec<Vec<BigInt>> = (0..3)
            .map(|i| (0..4).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        assert_eq!(integer_rank(&rows), 3);
    }

    #[test]
    fn orbit_indexing() {
        let n = example_n();
        let u = example_seed();
        let o = orbit(&n, &u, 2).unwrap();
        assert_eq!(o[2], u);
        assert_eq!(o[3], u.applied_by(&n));
        assert_eq!(o[1].applied_by(&n), u);
    }
}
