//! The s-ordered polarization kernel as an explicit block-diagonal matrix on
//! truncated two-mode Fock space:
//!
//! `w(s; theta, phi) = U(theta, phi) [((s+1)/(s-1))^{n_V} (2 n_H + 1 - s)/(1 - s)] U†(theta, phi)`
//!
//! with `U` taken from [`rotation_matrix_oracle`]. Nothing here touches the
//! d-function tables or the quasidistribution sums, so agreement between the
//! two is a genuine check of conventions.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::PolarizationState;
use crate::su2::{oracle_cap, rotation_matrix_oracle};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedKernel {
    pub s: f64,
    pub theta: f64,
    pub phi: f64,
    blocks: Vec<Array2<Complex64>>,
}

impl TruncatedKernel {
    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &Array2<Complex64> {
        &self.blocks[n]
    }

    /// Total dimension `sum_{N <= n_max} (N + 1)`.
    pub fn dim(&self) -> usize {
        let n = self.n_max() + 1;
        n * (n + 1) / 2
    }

    /// The full matrix with blocks placed along the diagonal.
    pub fn to_dense(&self) -> Array2<Complex64> {
        let dim = self.dim();
        let mut out = Array2::zeros((dim, dim));
        let mut offset = 0;
        for block in &self.blocks {
            let b = block.nrows();
            out.slice_mut(ndarray::s![offset..offset + b, offset..offset + b])
                .assign(block);
            offset += b;
        }
        out
    }
}

/// Diagonal of the bracketed operator on block `N`, indexed by `k` (`n_V = k`, `n_H = N - k`).
pub fn kernel_diagonal(s: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let n_h = (n - k) as f64;
            if s == -1.0 {
                // projector onto n_V = 0, weighted by n_H + 1
                if k == 0 {
                    n_h + 1.0
                } else {
                    0.0
                }
            } else if s == 0.0 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (2.0 * n_h + 1.0)
            } else {
                ((s + 1.0) / (s - 1.0)).powi(k as i32) * (2.0 * n_h + 1.0 - s) / (1.0 - s)
            }
        })
        .collect()
}

pub fn kernel_matrix(s: f64, theta: f64, phi: f64, n_max: usize) -> Result<TruncatedKernel> {
    if !(-1.0..=0.0).contains(&s) {
        return Err(Error::OrderingOutOfRange(s));
    }
    let cap = oracle_cap();
    if n_max > cap {
        return Err(Error::OracleCap { n: n_max, cap });
    }
    let blocks = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let u = rotation_matrix_oracle(n, theta, phi)?;
            let diag = kernel_diagonal(s, n);
            let mut scaled = u.clone();
            for (k, mut col) in scaled.columns_mut().into_iter().enumerate() {
                col.mapv_inplace(|z| z * diag[k]);
            }
            let u_dag = u.t().mapv(|z| z.conj());
            Ok(scaled.dot(&u_dag))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedKernel {
        s,
        theta,
        phi,
        blocks,
    })
}

/// `<Psi| w(s; theta, phi) |Psi>` as a complex number, block by block.
pub fn kernel_expectation(
    state: &PolarizationState,
    s: f64,
    theta: f64,
    phi: f64,
) -> Result<Complex64> {
    let kernel = kernel_matrix(s, theta, phi, state.n_max())?;
    let mut total = Complex64::new(0.0, 0.0);
    for (n, psi) in state.blocks().iter().enumerate() {
        let k = kernel.block(n);
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                total += a.conj() * k[[i, j]] * b;
            }
        }
    }
    Ok(total)
}

/// The generalized Weyl rule for a pure state, `W^(s) = <Psi| w^(s) |Psi>`.
pub fn quasidist_via_kernel(
    state: &PolarizationState,
    s: f64,
    theta: f64,
    phi: f64,
) -> Result<f64> {
    kernel_expectation(state, s, theta, phi).map(|z| z.re)
}
