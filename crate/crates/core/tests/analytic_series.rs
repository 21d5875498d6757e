use num_complex::Complex64;

use steinlab::analytic::{
    delta_factor, gap_set, laurent_coefficient, monomial_section, omega_factor, SeriesSpec,
    SeriesVariant, StripPoint,
};
use steinlab::intcore::{covector_action, fibonacci_matrix, IntMatrix, LatticeVector, TorusPoint};
use steinlab::steinness::ModulusSpec;
use steinlab::Error;

fn spec(m: IntMatrix, modulus: ModulusSpec, k: &[i64]) -> SeriesSpec {
    SeriesSpec::new(
        m,
        modulus,
        LatticeVector::from_i64(k),
        Complex64::new(0.0, 0.0),
    )
    .unwrap()
}

#[test]
fn coefficients_live_on_the_orbit() {
    let s = spec(fibonacci_matrix(), ModulusSpec::Finite(8.0), &[1, 0]);
    let f = |w: &StripPoint, z: &steinlab::intcore::ComplexPoint| {
        monomial_section(&s, w, z, 1e-13).map(|v| v.value)
    };
    let w = StripPoint::new(Complex64::new(-0.4, 0.1), s.modulus).unwrap();
    let anchor = omega_factor(s.anchor.w(), &s).unwrap();
    for j in -1i64..=1 {
        let kj = covector_action(&s.k, &s.matrix, j).unwrap();
        let g = laurent_coefficient(f, &kj, &w, &[1.2, 0.9], 16).unwrap();
        let wj = w.w() + j as f64;
        let closed = omega_factor(wj, &s).unwrap() * delta_factor(wj, s.anchor.w()) / anchor;
        assert!((g - closed).norm() < 1e-9, "j = {j}: {g} vs {closed}");
    }
    for off in [[0, 0], [1, 2], [2, 0], [-1, 0]] {
        let g =
            laurent_coefficient(f, &LatticeVector::from_i64(&off), &w, &[1.0, 1.0], 16).unwrap();
        assert!(g.norm() < 1e-9, "{off:?}: {g}");
    }
}

#[test]
fn polynomial_variant_shift_relation() {
    let shear = IntMatrix::from_i64(&[[1, 1], [0, 1]]);
    let s = spec(shear, ModulusSpec::TwoInfinity, &[0, 1]);
    assert!(matches!(s.variant, SeriesVariant::Polynomial { .. }));
    let f = |w: &StripPoint, z: &steinlab::intcore::ComplexPoint| {
        monomial_section(&s, w, z, 1e-12).map(|v| v.value)
    };
    let w = StripPoint::new(Complex64::new(0.25, 0.4), s.modulus).unwrap();
    for j in -2i64..=2 {
        let kj = covector_action(&s.k, &s.matrix, j).unwrap();
        let lhs = laurent_coefficient(f, &kj, &w, &[1.0, 1.0], 16).unwrap();
        let rhs = laurent_coefficient(f, &s.k, &w.shifted(j as f64), &[1.0, 1.0], 16).unwrap();
        assert!((lhs - rhs).norm() < 1e-6, "j = {j}: {lhs} vs {rhs}");
    }
}

#[test]
fn strip_is_enforced() {
    let s = spec(fibonacci_matrix(), ModulusSpec::Finite(10.0), &[1, 0]);
    // Half-width m/(4π) ≈ 0.796.
    assert!(matches!(
        StripPoint::new(Complex64::new(0.0, 0.8), s.modulus),
        Err(Error::OutsideStrip { .. })
    ));
    assert!(StripPoint::new(Complex64::new(3.0, 0.79), s.modulus).is_ok());
}

#[test]
fn rational_rotation_gaps() {
    let g = gap_set(&TorusPoint::from_turns(&[1.0 / 3.0, 0.5]), 1e-6, 30).unwrap();
    assert_eq!(g.members, (0..=30).step_by(6).collect::<Vec<u64>>());
    assert_eq!(g.max_gap, 6);
}
