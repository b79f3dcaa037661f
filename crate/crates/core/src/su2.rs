//! Wigner d-functions in the `|N, k>` indexing and SU(2) coherent states.
//!
//! Inside the invariant subspace with `N` excitations, `|N, k>` carries the
//! `J_z` eigenvalue `(N - 2k)/2`, so `k = 0` is the highest weight. The
//! d-functions follow `d^N_{mn}(theta) = <N, m| exp(i theta J_y) |N, n>` with the
//! Schwinger generator `J_y = (a_H† a_V - a_V† a_H) / 2i`, which gives
//! `d^1_{10}(theta) = -sin(theta/2)`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::state::ln_factorials;

/// Default largest block accepted by the matrix-exponential oracle.
pub const DEFAULT_ORACLE_CAP: usize = 30;

/// Environment variable overriding [`DEFAULT_ORACLE_CAP`].
pub const ORACLE_CAP_ENV: &str = "POLARQ_ORACLE_CAP";

pub fn oracle_cap() -> usize {
    std::env::var(ORACLE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// All d-function blocks `D^N[m][n] = d^N_{mn}(theta)` for `N = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDTable {
    theta: f64,
    blocks: Vec<Array2<f64>>,
}

impl WignerDTable {
    /// Builds every block by laddering `N -> N + 1` with one extra creation
    /// operator. The rotation maps
    /// `a_H† -> c a_H† - s a_V†` and `a_V† -> s a_H† + c a_V†`
    /// (`c = cos(theta/2)`, `s = sin(theta/2)`), and
    ///
    /// `|N+1, n> = [sqrt(N+1-n) a_H† |N, n> + sqrt(n) a_V† |N, n-1>] / (N + 1)`,
    ///
    /// so each entry of block `N + 1` is a four-term combination of block `N`
    /// with coefficients bounded by one. Using both routes symmetrically keeps
    /// the recursion stable; either route alone loses digits geometrically
    /// for intermediate angles.
    pub fn new(n_max: usize, theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        let sqrt: Vec<f64> = (0..=n_max + 1).map(|j| (j as f64).sqrt()).collect();
        let mut blocks = Vec::with_capacity(n_max + 1);
        blocks.push(Array2::from_elem((1, 1), 1.0));
        for n in 0..n_max {
            let prev = &blocks[n];
            let next_dim = n + 2;
            let mut next = Array2::<f64>::zeros((next_dim, next_dim));
            let inv = 1.0 / (n + 1) as f64;
            // scatter each entry of block n into its four neighbours
            for row in 0..=n {
                for col in 0..=n {
                    let d = prev[[row, col]];
                    if d == 0.0 {
                        continue;
                    }
                    let h = sqrt[n + 1 - col] * d * inv;
                    let v = sqrt[col + 1] * d * inv;
                    next[[row, col]] += c * sqrt[n + 1 - row] * h;
                    next[[row + 1, col]] -= s * sqrt[row + 1] * h;
                    next[[row, col + 1]] += s * sqrt[n + 1 - row] * v;
                    next[[row + 1, col + 1]] += c * sqrt[row + 1] * v;
                }
            }
            blocks.push(next);
        }
        Self { theta, blocks }
    }

    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn block(&self, n: usize) -> &Array2<f64> {
        &self.blocks[n]
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize, k: usize) -> f64 {
        self.blocks[n][[m, k]]
    }
}

pub fn wigner_d_table(n_max: usize, theta: f64) -> WignerDTable {
    WignerDTable::new(n_max, theta)
}

/// Single d-function value `<N, m| exp(i theta J_y) |N, n>`.
pub fn wigner_d(n: usize, m: usize, k: usize, theta: f64) -> Result<f64> {
    if m > n || k > n {
        return Err(Error::IndexOutOfRange { n, row: m, col: k });
    }
    Ok(WignerDTable::new(n, theta).get(n, m, k))
}

/// Components of `|N, theta, phi> = U(theta, phi) |N, 0>` in the `|N, k>` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2CoherentVector {
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    pub amplitudes: Vec<Complex64>,
}

/// `amplitude_k = sqrt(C(N,k)) sin^k(theta/2) cos^{N-k}(theta/2) e^{-i k phi}`.
pub fn su2_coherent_amplitudes(n: usize, theta: f64, phi: f64) -> Su2CoherentVector {
    let lf = ln_factorials(n);
    let (s, c) = (0.5 * theta).sin_cos();
    let amplitudes = (0..=n)
        .map(|k| {
            let binom = (0.5 * (lf[n] - lf[k] - lf[n - k])).exp();
            let mag = binom * s.powi(k as i32) * c.powi((n - k) as i32);
            Complex64::from_polar(1.0, -(k as f64) * phi) * mag
        })
        .collect();
    Su2CoherentVector {
        n,
        theta,
        phi,
        amplitudes,
    }
}

/// Block `N` of `U(theta, phi) = exp[(theta/2)(e^{-i phi} a_H a_V† - e^{i phi} a_V a_H†)]`,
/// computed by exponentiating the generator matrix directly.
///
/// Shares nothing with [`WignerDTable`]; it exists to cross-check it. At
/// `phi = 0` this equals the d-block at angle `-theta`.
pub fn rotation_matrix_oracle(n: usize, theta: f64, phi: f64) -> Result<Array2<Complex64>> {
    let cap = oracle_cap();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    let dim = n + 1;
    // a_H a_V† |N, k> = sqrt((N-k)(k+1)) |N, k+1>
    let mut ladder = Array2::<Complex64>::zeros((dim, dim));
    for k in 0..n {
        ladder[[k + 1, k]] = Complex64::new((((n - k) * (k + 1)) as f64).sqrt(), 0.0);
    }
    let forward = Complex64::from_polar(0.5 * theta, -phi);
    let backward = Complex64::from_polar(0.5 * theta, phi);
    let generator = ladder.mapv(|z| z * forward) - ladder.t().mapv(|z| z.conj() * backward);
    Ok(expm(&generator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn scalar_block_is_one() {
        for &t in &[0.0, 0.4, 2.0, -1.0, 7.0] {
            assert_eq!(wigner_d(0, 0, 0, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn spin_half_block() {
        // 2x2 exponential of i theta sigma_y / 2
        let t = 0.9f64;
        assert!((wigner_d(1, 0, 0, t).unwrap() - (t / 2.0).cos()).abs() < 1e-16);
        assert!((wigner_d(1, 1, 0, t).unwrap() + (t / 2.0).sin()).abs() < 1e-16);
        assert!((wigner_d(1, 0, 1, t).unwrap() - (t / 2.0).sin()).abs() < 1e-16);
    }

    #[test]
    fn zero_angle_is_identity() {
        let table = wigner_d_table(12, 0.0);
        for n in 0..=12 {
            for m in 0..=n {
                for k in 0..=n {
                    let want = if m == k { 1.0 } else { 0.0 };
                    assert!((table.get(n, m, k) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn index_out_of_range() {
        assert_eq!(
            wigner_d(2, 3, 0, 0.1),
            Err(Error::IndexOutOfRange {
                n: 2,
                row: 3,
                col: 0
            })
        );
    }

    #[test]
    fn coherent_amplitude_poles_and_equator() {
        let north = su2_coherent_amplitudes(5, 0.0, 1.2);
        assert_eq!(north.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(north.amplitudes[1..].iter().all(|z| z.norm() == 0.0));

        let phi = 0.8;
        let south = su2_coherent_amplitudes(5, PI, phi);
        assert!((south.amplitudes[5] - Complex64::from_polar(1.0, -5.0 * phi)).norm() < 1e-14);
        assert!(south.amplitudes[..5].iter().all(|z| z.norm() < 1e-14));

        let eq = su2_coherent_amplitudes(2, PI / 2.0, 0.0);
        let want = [0.5, FRAC_1_SQRT_2, 0.5];
        for (z, w) in eq.amplitudes.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn oracle_first_column_is_the_coherent_state() {
        let (n, t, p) = (7, 1.1, 2.3);
        let u = rotation_matrix_oracle(n, t, p).unwrap();
        let coh = su2_coherent_amplitudes(n, t, p);
        for k in 0..=n {
            assert!((u[[k, 0]] - coh.amplitudes[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn oracle_identity_at_zero_angle() {
        let u = rotation_matrix_oracle(6, 0.0, 1.0).unwrap();
        assert_eq!(u, Array2::<Complex64>::eye(7));
    }

    #[test]
    fn oracle_cap_enforced() {
        assert!(matches!(
            rotation_matrix_oracle(DEFAULT_ORACLE_CAP + 1, 0.1, 0.0),
            Err(Error::OracleCap { .. })
        ));
    }
}
