//! Husimi Q and Wigner W on the Poincaré sphere from the invariant-subspace
//! expansion of a pure state, closed forms for the coherent and two-mode
//! squeezed vacuum cases, and sphere integration.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SphericalGrid;
use crate::state::{mean_excitation, PolarizationState};
use crate::su2::{su2_coherent_amplitudes, WignerDTable};
use crate::sum::{ComplexNeumaierSum, NeumaierSum};

/// The double sum is refused where `|cos(theta)|` falls below this.
pub const EQUATOR_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WignerMethod {
    TripleSum,
    DoubleSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Q,
    Wigner,
    NormalizedF,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Q => "Q",
            FieldKind::Wigner => "Wigner",
            FieldKind::NormalizedF => "NormalizedF",
        }
    }
}

/// Result of a complex-valued sum whose exact value is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumValue {
    pub value: f64,
    pub imag_residue: f64,
}

// ---------------------------------------------------------------------------
// Point kernels shared by point and field evaluation
// ---------------------------------------------------------------------------

#[inline]
fn phases(n: usize, phi: f64) -> Vec<Complex64> {
    (0..=n)
        .map(|k| Complex64::from_polar(1.0, k as f64 * phi))
        .collect()
}

/// `|<N, theta, phi|Psi_N>|` profile at one polar angle: magnitudes of the SU(2)
/// coherent amplitudes for every block.
#[derive(Debug, Clone)]
struct QRow {
    magnitudes: Vec<Vec<f64>>,
}

impl QRow {
    fn new(n_max: usize, theta: f64) -> Self {
        let magnitudes = (0..=n_max)
            .map(|n| {
                su2_coherent_amplitudes(n, theta, 0.0)
                    .amplitudes
                    .iter()
                    .map(|z| z.re)
                    .collect()
            })
            .collect();
        Self { magnitudes }
    }

    /// `sum_N (N+1) |sum_k conj(amp_k) Psi_Nk|^2`, with `conj(amp_k) = mag_k e^{i k phi}`.
    fn eval(&self, state: &PolarizationState, phi: f64) -> f64 {
        let phase = phases(state.n_max(), phi);
        let mut acc = NeumaierSum::new();
        for (n, block) in state.blocks().iter().enumerate() {
            let mags = &self.magnitudes[n];
            let overlap: Complex64 = block
                .iter()
                .enumerate()
                .map(|(k, psi)| mags[k] * phase[k] * psi)
                .sum();
            acc.add((n + 1) as f64 * overlap.norm_sqr());
        }
        acc.total()
    }
}

/// Triple sum, factorized over the inner pair of indices:
///
/// `W = sum_N sum_n (-1)^n (2N - 2n + 1) |A_n|^2`,
/// `A_n = sum_k d^N_{nk}(theta) e^{i k phi} Psi_Nk`,
///
/// which is `sum_{k,m,n} (-1)^n (2N-2n+1) Psi_Nk Psi*_Nm e^{i phi (k-m)} d^N_{nk}(theta) d^N_{mn}(-theta)`
/// since `d^N_{mn}(-theta) = d^N_{nm}(theta)`. Each term is real by construction.
fn triple_sum(state: &PolarizationState, table: &WignerDTable, phi: f64) -> SumValue {
    let phase = phases(state.n_max(), phi);
    let mut acc = NeumaierSum::new();
    for (n_tot, block) in state.blocks().iter().enumerate() {
        let d = table.block(n_tot);
        let rotated: Vec<Complex64> = block.iter().zip(&phase).map(|(psi, p)| psi * p).collect();
        for n in 0..=n_tot {
            let amp: Complex64 = rotated.iter().enumerate().map(|(k, u)| d[[n, k]] * u).sum();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * (2 * (n_tot - n) + 1) as f64 * amp.norm_sqr());
        }
    }
    SumValue {
        value: acc.total(),
        imag_residue: 0.0,
    }
}

/// Double sum at twice the polar angle:
///
/// `W = sum_N sum_{m,n} (-1)^n [N + 1 - (m + n - N)/cos(theta)] Psi_Nm Psi*_Nn e^{i phi (m-n)} d^N_{nm}(2 theta)`.
///
/// `table` must hold the d-functions at `2 theta`.
fn double_sum(
    state: &PolarizationState,
    table: &WignerDTable,
    theta: f64,
    phi: f64,
) -> Result<SumValue> {
    let cos = theta.cos();
    if cos.abs() < EQUATOR_GUARD {
        return Err(Error::EquatorGuard {
            theta,
            guard: EQUATOR_GUARD,
        });
    }
    let phase = phases(state.n_max(), phi);
    let mut acc = ComplexNeumaierSum::new();
    for (n_tot, block) in state.blocks().iter().enumerate() {
        let d = table.block(n_tot);
        let u: Vec<Complex64> = block.iter().zip(&phase).map(|(psi, p)| psi * p).collect();
        for m in 0..=n_tot {
            if u[m] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for n in 0..=n_tot {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let weight = (n_tot + 1) as f64 - (m as f64 + n as f64 - n_tot as f64) / cos;
                row += sign * weight * d[[n, m]] * u[n].conj();
            }
            acc.add(u[m] * row);
        }
    }
    let total = acc.total();
    Ok(SumValue {
        value: total.re,
        imag_residue: total.im.abs(),
    })
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

/// Husimi function `Q = sum_N (N+1) |<N, theta, phi|Psi>|^2`.
pub fn q_value(state: &PolarizationState, theta: f64, phi: f64) -> f64 {
    QRow::new(state.n_max(), theta).eval(state, phi)
}

pub fn wigner_value(
    state: &PolarizationState,
    theta: f64,
    phi: f64,
    method: WignerMethod,
) -> Result<f64> {
    wigner_value_detailed(state, theta, phi, method).map(|v| v.value)
}

/// Wigner value together with the discarded imaginary part of the sum.
pub fn wigner_value_detailed(
    state: &PolarizationState,
    theta: f64,
    phi: f64,
    method: WignerMethod,
) -> Result<SumValue> {
    match method {
        WignerMethod::TripleSum => Ok(triple_sum(
            state,
            &WignerDTable::new(state.n_max(), theta),
            phi,
        )),
        WignerMethod::DoubleSum => {
            if theta.cos().abs() < EQUATOR_GUARD {
                return Err(Error::EquatorGuard {
                    theta,
                    guard: EQUATOR_GUARD,
                });
            }
            double_sum(
                state,
                &WignerDTable::new(state.n_max(), 2.0 * theta),
                theta,
                phi,
            )
        }
    }
}

/// Wigner function of the coherent pair built by `make_coherent_pair(r, phi_rel, _)`:
///
/// `W = {r^2 [1 + sin(theta) cos(phi + phi_rel)] + 1} exp{-r^2 [1 - sin(theta) cos(phi + phi_rel)]}`.
pub fn coherent_wigner_closed(r: f64, phi_rel: f64, theta: f64, phi: f64) -> f64 {
    let c = theta.sin() * (phi + phi_rel).cos();
    let r2 = r * r;
    (r2 * (1.0 + c) + 1.0) * (-r2 * (1.0 - c)).exp()
}

/// Wigner function of the two-mode squeezed vacuum, with `t = |nu/mu| = tanh|xi|`:
///
/// `W = (1/mu^2) (1 - t^4) / [1 + 2 t^2 cos(2 theta) + t^4]^{3/2}`.
pub fn tmsv_wigner_closed(xi: Complex64, theta: f64) -> f64 {
    let r = xi.norm();
    let mu = r.cosh();
    let t2 = (r.sinh() / mu).powi(2);
    (1.0 - t2 * t2) / (mu * mu) / (1.0 + 2.0 * t2 * (2.0 * theta).cos() + t2 * t2).powf(1.5)
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionField {
    pub grid: SphericalGrid,
    pub kind: FieldKind,
    pub values: Vec<f64>,
    pub state_digest: String,
}

impl DistributionField {
    /// Node index, `(theta, phi)` and value of the largest entry.
    pub fn maximum(&self) -> (usize, f64, f64, f64) {
        let (i, v) =
            self.values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                    if v > best.1 {
                        (i, v)
                    } else {
                        best
                    }
                });
        let node = self.grid.node(i);
        (i, node.theta, node.phi, v)
    }

    pub fn minimum(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Values at fixed polar index, in azimuthal order.
    pub fn ring(&self, polar_index: usize) -> &[f64] {
        let na = self.grid.n_azimuthal();
        &self.values[polar_index * na..(polar_index + 1) * na]
    }
}

/// d-function tables keyed by `(n_max, angle)`.
///
/// Filled in one writer phase; afterwards only shared references are handed
/// out, so concurrent readers need no locking.
#[derive(Debug, Default)]
pub struct DTableCache {
    tables: HashMap<(usize, u64), Arc<WignerDTable>>,
}

impl DTableCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds (in parallel) every missing table for the given angles.
    pub fn populate(&mut self, n_max: usize, angles: &[f64]) {
        let missing: Vec<f64> = angles
            .iter()
            .copied()
            .filter(|a| !self.tables.contains_key(&(n_max, a.to_bits())))
            .collect();
        let built: Vec<(f64, WignerDTable)> = missing
            .par_iter()
            .map(|&a| (a, WignerDTable::new(n_max, a)))
            .collect();
        for (a, table) in built {
            self.tables.insert((n_max, a.to_bits()), Arc::new(table));
        }
    }

    pub fn get(&self, n_max: usize, angle: f64) -> Option<&Arc<WignerDTable>> {
        self.tables.get(&(n_max, angle.to_bits()))
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldOptions {
    pub method: WignerMethod,
    pub parallel: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            method: WignerMethod::TripleSum,
            parallel: true,
        }
    }
}

/// Evaluates Q or W at every grid node (triple sum, in parallel).
pub fn evaluate_field(
    state: &PolarizationState,
    grid: &SphericalGrid,
    kind: FieldKind,
) -> Result<DistributionField> {
    evaluate_field_with(state, grid, kind, FieldOptions::default())
}

/// Node values are computed by the same code path as the point functions, so
/// parallel and sequential evaluation agree bit for bit.
pub fn evaluate_field_with(
    state: &PolarizationState,
    grid: &SphericalGrid,
    kind: FieldKind,
    options: FieldOptions,
) -> Result<DistributionField> {
    let n_max = state.n_max();
    let na = grid.n_azimuthal();
    let values = match kind {
        FieldKind::Q => {
            let rows: Vec<QRow> = grid
                .polar_nodes
                .par_iter()
                .map(|&(t, _)| QRow::new(n_max, t))
                .collect();
            map_nodes(grid, options.parallel, |i| {
                Ok(rows[i / na].eval(state, grid.azimuthal_nodes[i % na]))
            })?
        }
        FieldKind::Wigner | FieldKind::NormalizedF => {
            let mut cache = DTableCache::new();
            let values = match options.method {
                WignerMethod::TripleSum => {
                    let angles: Vec<f64> = grid.polar_nodes.iter().map(|&(t, _)| t).collect();
                    cache.populate(n_max, &angles);
                    let cache = &cache;
                    map_nodes(grid, options.parallel, |i| {
                        let node = grid.node(i);
                        let table = cache.get(n_max, node.theta).expect("table populated");
                        Ok(triple_sum(state, table, node.phi).value)
                    })?
                }
                WignerMethod::DoubleSum => {
                    if let Some(&(theta, _)) = grid
                        .polar_nodes
                        .iter()
                        .find(|(t, _)| t.cos().abs() < EQUATOR_GUARD)
                    {
                        return Err(Error::EquatorGuard {
                            theta,
                            guard: EQUATOR_GUARD,
                        });
                    }
                    let angles: Vec<f64> = grid.polar_nodes.iter().map(|&(t, _)| 2.0 * t).collect();
                    cache.populate(n_max, &angles);
                    let cache = &cache;
                    map_nodes(grid, options.parallel, |i| {
                        let node = grid.node(i);
                        let table = cache.get(n_max, 2.0 * node.theta).expect("table populated");
                        double_sum(state, table, node.theta, node.phi).map(|v| v.value)
                    })?
                }
            };
            if kind == FieldKind::NormalizedF {
                let wigner = DistributionField {
                    grid: grid.clone(),
                    kind: FieldKind::Wigner,
                    values,
                    state_digest: state.digest(),
                };
                return normalized_field(&wigner, mean_excitation(state));
            }
            values
        }
    };
    Ok(DistributionField {
        grid: grid.clone(),
        kind,
        values,
        state_digest: state.digest(),
    })
}

fn map_nodes<F>(grid: &SphericalGrid, parallel: bool, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    if parallel {
        (0..grid.len()).into_par_iter().map(&f).collect()
    } else {
        (0..grid.len()).map(f).collect()
    }
}

/// `f = 1 + W / <N>`.
pub fn normalized_field(field: &DistributionField, mean_n: f64) -> Result<DistributionField> {
    if field.kind != FieldKind::Wigner {
        return Err(Error::KindMismatch {
            expected: "Wigner",
            got: field.kind.name(),
        });
    }
    if !(mean_n.is_finite() && mean_n > 0.0) {
        return Err(Error::ZeroMeanExcitation(mean_n));
    }
    Ok(DistributionField {
        grid: field.grid.clone(),
        kind: FieldKind::NormalizedF,
        values: field.values.iter().map(|w| 1.0 + w / mean_n).collect(),
        state_digest: field.state_digest.clone(),
    })
}

/// `(1/4 pi) sum_i w_i values_i`.
pub fn integrate(field: &DistributionField) -> f64 {
    let acc: NeumaierSum = field
        .grid
        .nodes()
        .zip(&field.values)
        .map(|(node, v)| node.weight * v)
        .collect();
    acc.total() / (4.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_coherent_pair, make_tmsv};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn photon_h() -> PolarizationState {
        PolarizationState::from_blocks(vec![
            vec![Complex64::new(0.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn vacuum_is_flat() {
        let vac = PolarizationState::vacuum();
        for &(t, p) in &[(0.1, 0.2), (1.5, 4.0), (3.0, 6.0)] {
            assert_eq!(q_value(&vac, t, p), 1.0);
            assert_eq!(
                wigner_value(&vac, t, p, WignerMethod::TripleSum).unwrap(),
                1.0
            );
            assert_eq!(
                wigner_value(&vac, t, p, WignerMethod::DoubleSum).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn single_photon_closed_forms() {
        let s = photon_h();
        for &t in &[0.0, 0.3, 1.2, 2.0, 2.9, PI] {
            let q = q_value(&s, t, 0.7);
            assert!((q - 2.0 * (t / 2.0).cos().powi(2)).abs() < 1e-15);
            let w = wigner_value(&s, t, 0.7, WignerMethod::TripleSum).unwrap();
            assert!((w - (1.0 + 2.0 * t.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn double_sum_refuses_equator() {
        let s = photon_h();
        let err = wigner_value(&s, FRAC_PI_2, 0.0, WignerMethod::DoubleSum).unwrap_err();
        assert!(matches!(err, Error::EquatorGuard { .. }));
        assert!(wigner_value(&s, FRAC_PI_2, 0.0, WignerMethod::TripleSum).is_ok());
    }

    #[test]
    fn double_sum_agrees_with_triple_sum() {
        let s = make_coherent_pair(1.5, 0.4, 30).unwrap();
        for &(t, p) in &[(0.3, 0.1), (1.0, 2.0), (2.2, 5.5), (1.45, 3.0)] {
            let a = wigner_value(&s, t, p, WignerMethod::TripleSum).unwrap();
            let b = wigner_value_detailed(&s, t, p, WignerMethod::DoubleSum).unwrap();
            assert!((a - b.value).abs() < 1e-9, "{a} vs {}", b.value);
            assert!(b.imag_residue < 1e-12);
        }
    }

    #[test]
    fn coherent_closed_form_peak() {
        for &r in &[0.0, 1.0, 5.0] {
            assert!(
                (coherent_wigner_closed(r, 0.3, FRAC_PI_2, -0.3) - (2.0 * r * r + 1.0)).abs()
                    < 1e-12
            );
        }
        assert_eq!(coherent_wigner_closed(0.0, 1.0, 0.4, 2.0), 1.0);
        let peak = coherent_wigner_closed(5.0, FRAC_PI_2, FRAC_PI_2, 1.5 * PI);
        assert!((peak - 51.0).abs() < 1e-10);
    }

    #[test]
    fn tmsv_closed_form_limits() {
        for &t in &[0.0, 0.5, 1.0] {
            assert!((tmsv_wigner_closed(Complex64::new(0.0, 0.0), t) - 1.0).abs() < 1e-15);
        }
        let xi = Complex64::new(0.5, 0.0);
        let t2 = 0.5f64.tanh().powi(2);
        let ratio = tmsv_wigner_closed(xi, FRAC_PI_2) / tmsv_wigner_closed(xi, 0.0);
        assert!((ratio - ((1.0 + t2) / (1.0 - t2)).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn tmsv_sum_matches_closed_form_pointwise() {
        let xi = Complex64::from_polar(0.5, 0.6);
        let s = make_tmsv(xi, 60).unwrap();
        for &t in &[0.0, 0.4, 1.0, FRAC_PI_2, 2.5] {
            let w = wigner_value(&s, t, 1.3, WignerMethod::TripleSum).unwrap();
            assert!((w - tmsv_wigner_closed(xi, t)).abs() < 1e-9);
        }
    }

    #[test]
    fn normalized_field_rules() {
        let grid = SphericalGrid::new(4, 8).unwrap();
        let zero = DistributionField {
            grid: grid.clone(),
            kind: FieldKind::Wigner,
            values: vec![0.0; 32],
            state_digest: "x".into(),
        };
        let f = normalized_field(&zero, 2.0).unwrap();
        assert!(f.values.iter().all(|&v| v == 1.0));
        assert_eq!(
            normalized_field(&zero, 0.0).unwrap_err(),
            Error::ZeroMeanExcitation(0.0)
        );
        assert!(matches!(
            normalized_field(&f, 1.0),
            Err(Error::KindMismatch { .. })
        ));

        let w = evaluate_field(&photon_h(), &grid, FieldKind::Wigner).unwrap();
        let f = normalized_field(&w, 1.0).unwrap();
        for (node, v) in grid.nodes().zip(&f.values) {
            assert!((v - (2.0 + 2.0 * node.theta.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn field_matches_point_calls_exactly() {
        let s = make_coherent_pair(1.2, 0.3, 12).unwrap();
        let grid = SphericalGrid::new(6, 8).unwrap();
        let w = evaluate_field(&s, &grid, FieldKind::Wigner).unwrap();
        let q = evaluate_field(&s, &grid, FieldKind::Q).unwrap();
        let d = evaluate_field_with(
            &s,
            &grid,
            FieldKind::Wigner,
            FieldOptions {
                method: WignerMethod::DoubleSum,
                parallel: true,
            },
        )
        .unwrap();
        for (i, node) in grid.nodes().enumerate() {
            assert_eq!(
                w.values[i],
                wigner_value(&s, node.theta, node.phi, WignerMethod::TripleSum).unwrap()
            );
            assert_eq!(
                d.values[i],
                wigner_value(&s, node.theta, node.phi, WignerMethod::DoubleSum).unwrap()
            );
            assert_eq!(q.values[i], q_value(&s, node.theta, node.phi));
        }
    }

    #[test]
    fn integrals_of_simple_fields() {
        let grid = SphericalGrid::default();
        let vac = PolarizationState::vacuum();
        for kind in [FieldKind::Q, FieldKind::Wigner] {
            let f = evaluate_field(&vac, &grid, kind).unwrap();
            assert!(f.values.iter().all(|&v| v == 1.0));
            assert!((integrate(&f) - 1.0).abs() < 1e-12);
        }
        let w = evaluate_field(&photon_h(), &grid, FieldKind::Wigner).unwrap();
        assert!((integrate(&w) - 1.0).abs() < 1e-13);
        let q = evaluate_field(
            &make_tmsv(Complex64::new(0.5, 0.0), 60).unwrap(),
            &grid,
            FieldKind::Q,
        )
        .unwrap();
        assert!((integrate(&q) - 1.0).abs() < 1e-6);
        assert!(matches!(
            evaluate_field(&vac, &grid, FieldKind::NormalizedF),
            Err(Error::ZeroMeanExcitation(_))
        ));
    }

    #[test]
    fn cache_populates_once() {
        let mut cache = DTableCache::new();
        cache.populate(4, &[0.1, 0.2, 0.1]);
        assert_eq!(cache.len(), 2);
        cache.populate(4, &[0.2, 0.3]);
        assert_eq!(cache.len(), 3);
        assert!(cache.get(4, 0.3).is_some() && cache.get(5, 0.3).is_none());
    }
}
