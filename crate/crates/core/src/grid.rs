//! Product quadrature on the sphere: Gauss-Legendre in `cos(theta)` times a
//! uniform rule in `phi`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_POLAR: usize = 64;
pub const DEFAULT_AZIMUTHAL: usize = 128;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes in decreasing order.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalGrid {
    /// `(theta, weight)` with weights summing to 2 (the measure of `d cos(theta)`).
    pub polar_nodes: Vec<(f64, f64)>,
    /// Uniformly spaced `phi` values, each carrying weight `2 pi / len`.
    pub azimuthal_nodes: Vec<f64>,
}

/// One node of a [`SphericalGrid`] with its full solid-angle weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl SphericalGrid {
    pub fn new(n_polar: usize, n_azimuthal: usize) -> Result<Self> {
        if n_polar < 2 || !n_polar.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "polar node count must be even and >= 2, got {n_polar}"
            )));
        }
        if n_azimuthal < 4 {
            return Err(Error::InvalidGrid(format!(
                "azimuthal node count must be >= 4, got {n_azimuthal}"
            )));
        }
        let polar_nodes = gauss_legendre(n_polar)
            .into_iter()
            .map(|(x, w)| (x.acos(), w))
            .collect();
        let azimuthal_nodes = (0..n_azimuthal)
            .map(|j| 2.0 * PI * j as f64 / n_azimuthal as f64)
            .collect();
        Ok(Self {
            polar_nodes,
            azimuthal_nodes,
        })
    }

    pub fn n_polar(&self) -> usize {
        self.polar_nodes.len()
    }

    pub fn n_azimuthal(&self) -> usize {
        self.azimuthal_nodes.len()
    }

    pub fn len(&self) -> usize {
        self.n_polar() * self.n_azimuthal()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn azimuthal_weight(&self) -> f64 {
        2.0 * PI / self.n_azimuthal() as f64
    }

    /// Node `i`, ordered polar-major: `i = p * n_azimuthal + a`.
    pub fn node(&self, i: usize) -> GridNode {
        let (p, a) = (i / self.n_azimuthal(), i % self.n_azimuthal());
        let (theta, w) = self.polar_nodes[p];
        GridNode {
            theta,
            phi: self.azimuthal_nodes[a],
            weight: w * self.azimuthal_weight(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = GridNode> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

impl Default for SphericalGrid {
    fn default() -> Self {
        Self::new(DEFAULT_POLAR, DEFAULT_AZIMUTHAL).expect("default grid is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_full_solid_angle() {
        for &(p, a) in &[(2, 4), (16, 32), (64, 128), (120, 7)] {
            let g = SphericalGrid::new(p, a).unwrap();
            let total: f64 = g.nodes().map(|n| n.weight).sum();
            assert!((total - 4.0 * PI).abs() < 1e-12, "{p}x{a}: {total}");
        }
    }

    #[test]
    fn no_node_on_the_equator() {
        let g = SphericalGrid::default();
        assert!(g.polar_nodes.iter().all(|(t, _)| t.cos().abs() > 1e-3));
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // 32-point rule is exact through degree 63
        let rule = gauss_legendre(32);
        for deg in 0..=63u32 {
            let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((approx - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SphericalGrid::new(3, 8).is_err());
        assert!(SphericalGrid::new(0, 8).is_err());
        assert!(SphericalGrid::new(4, 3).is_err());
    }
}
