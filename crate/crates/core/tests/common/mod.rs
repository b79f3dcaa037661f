#![allow(dead_code)]

use num_complex::Complex64;
use polarq::PolarizationState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized state with Gaussian coefficients on every block up to `n_max`.
pub fn random_state(rng: &mut ChaCha8Rng, n_max: usize) -> PolarizationState {
    let mut blocks: Vec<Vec<Complex64>> = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect()
        })
        .collect();
    let norm: f64 = blocks
        .iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for c in blocks.iter_mut().flatten() {
        *c /= norm;
    }
    PolarizationState::new(blocks, 0.0).unwrap()
}

/// Uniform point on the sphere.
pub fn random_angle(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.gen();
    (
        (1.0 - 2.0 * u).acos(),
        std::f64::consts::TAU * rng.gen::<f64>(),
    )
}

pub fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|j| (j as f64).ln()).sum()
}

/// Textbook factorial sum for `<j, m1| exp(-i beta J_y) |j, m2>`, with `j = n/2`
/// and magnetic numbers written as `m = j - k`.
pub fn wigner_d_factorial(n: usize, k1: usize, k2: usize, beta: f64) -> f64 {
    let (c, s) = ((0.5 * beta).cos(), (0.5 * beta).sin());
    // with j + m = n - k and j - m = k
    let (jp1, jm1, jp2, jm2) = (n - k1, k1, n - k2, k2);
    let pre = 0.5 * (ln_factorial(jp1) + ln_factorial(jm1) + ln_factorial(jp2) + ln_factorial(jm2));
    let mut total = 0.0;
    for t in 0..=n {
        // m1 - m2 = k2 - k1
        let d = k2 as i64 - k1 as i64;
        let (a, b, e) = (jp2 as i64 - t as i64, d + t as i64, jm1 as i64 - t as i64);
        if a < 0 || b < 0 || e < 0 {
            continue;
        }
        let ln_den = ln_factorial(a as usize)
            + ln_factorial(t)
            + ln_factorial(b as usize)
            + ln_factorial(e as usize);
        // exponents 2j + m2 - m1 - 2t and m1 - m2 + 2t
        let pc = n as i64 - d - 2 * t as i64;
        let ps = d + 2 * t as i64;
        let sign = if (d + t as i64) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * (pre - ln_den).exp() * c.powi(pc as i32) * s.powi(ps as i32);
    }
    total
}
