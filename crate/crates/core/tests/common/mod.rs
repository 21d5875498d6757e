//! Independent floating-point root oracle shared by the integration tests.

use num_complex::Complex64;
use std::f64::consts::PI;

/// All roots by Weierstrass (Durand–Kerner) iteration; coefficients low to
/// high, monic.
pub fn roots_dk(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let eval = |z: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    };
    let bound = 1.0 + c[..d].iter().map(|a| a.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| Complex64::from_polar(bound * 0.9, 0.4 + 2.0 * PI * i as f64 / d as f64))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// House of a monic integer polynomial after removing the factors `x`.
pub fn house_oracle(c: &[i64]) -> f64 {
    let lead_zeros = c.iter().take_while(|&&a| a == 0).count();
    let c: Vec<f64> = c[lead_zeros..].iter().map(|&a| a as f64).collect();
    match c.len() {
        1 => 0.0,
        2 => c[0].abs(),
        _ => roots_dk(&c).iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}
