//! Two-mode pure states in the invariant-subspace basis `|N, k> = |N-k>_H (x) |k>_V`
//! and constructors for the coherent, squeezed, two-mode squeezed vacuum and
//! Kerr-evolved families.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hard ceiling on any truncation chosen or requested.
pub const DEFAULT_N_MAX_CAP: usize = 512;

/// Slack allowed on the norm bookkeeping for floating-point round-off.
pub const NORM_SLACK: f64 = 1e-12;

/// Below this squeezing modulus the coherent-state formula is used directly.
pub const SQUEEZING_ZERO: f64 = 1e-12;

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Pure state with coefficients `Psi[N][k]`, `k = 0..=N`, for `N = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationState {
    blocks: Vec<Vec<Complex64>>,
    declared_norm_deficit: f64,
}

impl PolarizationState {
    /// Validates shape, finiteness and the norm bookkeeping.
    pub fn new(blocks: Vec<Vec<Complex64>>, declared_norm_deficit: f64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidState("no invariant subspaces".into()));
        }
        for (n, block) in blocks.iter().enumerate() {
            if block.len() != n + 1 {
                return Err(Error::InvalidState(format!(
                    "block N = {n} has {} coefficients, expected {}",
                    block.len(),
                    n + 1
                )));
            }
            if block.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidState(format!(
                    "non-finite coefficient in block N = {n}"
                )));
            }
        }
        if !(declared_norm_deficit.is_finite() && declared_norm_deficit >= 0.0) {
            return Err(Error::InvalidState(format!(
                "declared norm deficit {declared_norm_deficit} must be finite and nonnegative"
            )));
        }
        let state = Self {
            blocks,
            declared_norm_deficit,
        };
        let mass = state.norm_sqr();
        if mass > 1.0 + NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "retained mass {mass} exceeds 1"
            )));
        }
        if 1.0 - mass > declared_norm_deficit + NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "missing mass {} exceeds declared deficit {declared_norm_deficit}",
                1.0 - mass
            )));
        }
        Ok(state)
    }

    /// Declares whatever mass is missing as the deficit.
    pub fn from_blocks(blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        let mass: f64 = blocks.iter().flatten().map(|c| c.norm_sqr()).sum();
        Self::new(blocks, (1.0 - mass).max(0.0))
    }

    pub fn vacuum() -> Self {
        Self {
            blocks: vec![vec![Complex64::new(1.0, 0.0)]],
            declared_norm_deficit: 0.0,
        }
    }

    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &[Complex64] {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    pub fn coeff(&self, n: usize, k: usize) -> Complex64 {
        self.blocks[n][k]
    }

    pub fn declared_norm_deficit(&self) -> f64 {
        self.declared_norm_deficit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Short content hash of the coefficients, used to tag exported fields.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for block in &self.blocks {
            for c in block {
                hasher.update(c.re.to_le_bytes());
                hasher.update(c.im.to_le_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Truncated mean of the total excitation number.
pub fn mean_excitation(state: &PolarizationState) -> f64 {
    state
        .blocks()
        .iter()
        .enumerate()
        .map(|(n, block)| n as f64 * block.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum()
}

// ---------------------------------------------------------------------------
// Declarative state descriptions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Truncation {
    NMax { n_max: usize },
    Epsilon { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum StateFamily {
    CoherentPair {
        r: f64,
        phi_rel: f64,
    },
    SqueezedPair {
        #[serde(with = "json_complex")]
        alpha_h: Complex64,
        #[serde(with = "json_complex")]
        xi_h: Complex64,
        #[serde(with = "json_complex")]
        alpha_v: Complex64,
        #[serde(with = "json_complex")]
        xi_v: Complex64,
    },
    TwoModeSqueezedVacuum {
        #[serde(with = "json_complex")]
        xi: Complex64,
    },
    KerrEvolved {
        #[serde(with = "json_complex")]
        alpha_h: Complex64,
        #[serde(with = "json_complex")]
        alpha_v: Complex64,
        tau: f64,
    },
    /// Coefficients given directly, one array per invariant subspace.
    Explicit {
        #[serde(with = "json_complex::blocks")]
        coeffs: Vec<Vec<Complex64>>,
    },
}

/// Family, parameters and truncation policy for a state.
///
/// JSON form: `{"family": "...", "params": {...}, "truncation": {"n_max": 40}}` or
/// `{"truncation": {"epsilon": 1e-12}}`. Complex parameters accept a bare number,
/// a `[re, im]` pair or `{"re": .., "im": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub family: StateFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

/// Tail tolerance used when a spec omits its truncation policy.
pub const DEFAULT_EPSILON: f64 = 1e-12;

impl StateSpec {
    pub fn new(family: StateFamily, truncation: Truncation) -> Self {
        Self {
            family,
            truncation: Some(truncation),
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, x: f64) -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{x} is not finite"),
                })
            }
        }
        fn finite_c(name: &'static str, z: Complex64) -> Result<()> {
            finite(name, z.re)?;
            finite(name, z.im)
        }
        match &self.family {
            StateFamily::CoherentPair { r, phi_rel } => {
                finite("r", *r)?;
                finite("phi_rel", *phi_rel)?;
                if *r < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "r",
                        reason: "must be >= 0".into(),
                    });
                }
            }
            StateFamily::SqueezedPair {
                alpha_h,
                xi_h,
                alpha_v,
                xi_v,
            } => {
                finite_c("alpha_h", *alpha_h)?;
                finite_c("xi_h", *xi_h)?;
                finite_c("alpha_v", *alpha_v)?;
                finite_c("xi_v", *xi_v)?;
            }
            StateFamily::TwoModeSqueezedVacuum { xi } => finite_c("xi", *xi)?,
            StateFamily::KerrEvolved {
                alpha_h,
                alpha_v,
                tau,
            } => {
                finite_c("alpha_h", *alpha_h)?;
                finite_c("alpha_v", *alpha_v)?;
                finite("tau", *tau)?;
            }
            StateFamily::Explicit { .. } => {}
        }
        match self.truncation {
            Some(Truncation::Epsilon { epsilon }) if !(epsilon > 0.0 && epsilon < 1.0) => {
                Err(Error::InvalidTolerance(epsilon))
            }
            _ => Ok(()),
        }
    }

    /// Truncation that `build` will use.
    pub fn resolve_n_max(&self, cap: usize) -> Result<usize> {
        self.validate()?;
        if let StateFamily::Explicit { coeffs } = &self.family {
            return Ok(coeffs.len().saturating_sub(1));
        }
        let n_max = match self.truncation {
            Some(Truncation::NMax { n_max }) => n_max,
            Some(Truncation::Epsilon { epsilon }) => {
                suggest_truncation_with_cap(self, epsilon, cap)?
            }
            None => suggest_truncation_with_cap(self, DEFAULT_EPSILON, cap)?,
        };
        if n_max > cap {
            return Err(Error::TruncationCap {
                required: n_max,
                cap,
            });
        }
        Ok(n_max)
    }

    pub fn build(&self) -> Result<PolarizationState> {
        self.build_with_cap(DEFAULT_N_MAX_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<PolarizationState> {
        let n_max = self.resolve_n_max(cap)?;
        match &self.family {
            StateFamily::CoherentPair { r, phi_rel } => make_coherent_pair(*r, *phi_rel, n_max),
            StateFamily::SqueezedPair {
                alpha_h,
                xi_h,
                alpha_v,
                xi_v,
            } => make_squeezed_pair(*alpha_h, *xi_h, *alpha_v, *xi_v, n_max),
            StateFamily::TwoModeSqueezedVacuum { xi } => make_tmsv(*xi, n_max),
            StateFamily::KerrEvolved {
                alpha_h,
                alpha_v,
                tau,
            } => make_kerr(*alpha_h, *alpha_v, *tau, n_max),
            StateFamily::Explicit { coeffs } => PolarizationState::from_blocks(coeffs.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// Truncation control
// ---------------------------------------------------------------------------

/// `P(X > n)` for `X ~ Poisson(mean)`, for every `n` in `0..len`.
///
/// Computed by summing the upper tail from far out, so small tails keep full
/// relative precision.
fn poisson_tails(mean: f64, len: usize) -> Vec<f64> {
    if mean <= 0.0 {
        return vec![0.0; len];
    }
    let horizon = len.max((mean + 40.0 * mean.sqrt() + 80.0).ceil() as usize);
    let lf = ln_factorials(horizon);
    let ln_mean = mean.ln();
    let pmf: Vec<f64> = (0..=horizon)
        .map(|n| (-mean + n as f64 * ln_mean - lf[n]).exp())
        .collect();
    let mut tails = vec![0.0; horizon + 1];
    // tails[n] = sum_{j > n} pmf[j]
    for n in (0..horizon).rev() {
        tails[n] = tails[n + 1] + pmf[n + 1];
    }
    tails.truncate(len);
    tails
}

/// Probability mass of a Poisson(mean) variable above `n`.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    poisson_tails(mean, n + 1)[n]
}

fn first_below(tails: &[f64], eps: f64) -> Option<usize> {
    tails.iter().position(|&t| t < eps)
}

/// Smallest `n_max` whose discarded tail mass is below `eps`, with the default cap.
pub fn suggest_truncation(spec: &StateSpec, eps: f64) -> Result<usize> {
    suggest_truncation_with_cap(spec, eps, DEFAULT_N_MAX_CAP)
}

pub fn suggest_truncation_with_cap(spec: &StateSpec, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidTolerance(eps));
    }
    let search = 4 * cap + 64;
    let found = match &spec.family {
        StateFamily::CoherentPair { r, .. } => first_below(&poisson_tails(r * r, search), eps),
        StateFamily::KerrEvolved {
            alpha_h, alpha_v, ..
        } => first_below(
            &poisson_tails(alpha_h.norm_sqr() + alpha_v.norm_sqr(), search),
            eps,
        ),
        StateFamily::TwoModeSqueezedVacuum { xi } => Some(tmsv_truncation(xi.norm(), eps)),
        StateFamily::SqueezedPair {
            alpha_h,
            xi_h,
            alpha_v,
            xi_v,
        } => squeezed_pair_truncation(*alpha_h, *xi_h, *alpha_v, *xi_v, eps, search),
        StateFamily::Explicit { coeffs } => Some(coeffs.len().saturating_sub(1)),
    };
    match found {
        Some(n) if n <= cap => Ok(n),
        Some(n) => Err(Error::TruncationCap { required: n, cap }),
        None => Err(Error::TruncationCap {
            required: search,
            cap,
        }),
    }
}

fn tmsv_truncation(modulus: f64, eps: f64) -> usize {
    let t2 = modulus.tanh().powi(2);
    if t2 == 0.0 {
        return 0;
    }
    // discarded mass for n_max = 2K is t2^(K+1)
    let mut k = ((eps.ln() / t2.ln()).ceil() as usize).saturating_sub(1);
    while k > 0 && t2.powi(k as i32) < eps {
        k -= 1;
    }
    while t2.powi(k as i32 + 1) >= eps {
        k += 1;
    }
    2 * k
}

/// Exact tail of the total-number distribution of two independent squeezed
/// coherent modes, using a Poisson-type horizon with per-mode mean
/// `|alpha|^2 + sinh^2|xi|` to decide how far to tabulate.
fn squeezed_pair_truncation(
    alpha_h: Complex64,
    xi_h: Complex64,
    alpha_v: Complex64,
    xi_v: Complex64,
    eps: f64,
    search: usize,
) -> Option<usize> {
    let mean = alpha_h.norm_sqr()
        + xi_h.norm().sinh().powi(2)
        + alpha_v.norm_sqr()
        + xi_v.norm().sinh().powi(2);
    let spread = (2.0 * xi_h.norm().max(xi_v.norm())).exp();
    let horizon = ((mean + 40.0 * (mean * spread * spread + 1.0).sqrt() + 80.0 * spread).ceil()
        as usize)
        .min(search);
    let ph: Vec<f64> = squeezed_fock_amplitudes(alpha_h, xi_h, horizon)
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let pv: Vec<f64> = squeezed_fock_amplitudes(alpha_v, xi_v, horizon)
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let mut cumulative = 0.0;
    for n in 0..=horizon {
        cumulative += (0..=n).map(|k| ph[n - k] * pv[k]).sum::<f64>();
        if 1.0 - cumulative < eps {
            return Some(n);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Single-mode amplitudes
// ---------------------------------------------------------------------------

/// `<k|alpha>` for `k = 0..=k_max`, assembled in log space.
pub fn coherent_fock_amplitudes(alpha: Complex64, k_max: usize) -> Vec<Complex64> {
    let lf = ln_factorials(k_max);
    let modulus = alpha.norm();
    let arg = alpha.arg();
    (0..=k_max)
        .map(|k| {
            if modulus == 0.0 {
                return if k == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            let ln_mag = -0.5 * modulus * modulus + k as f64 * modulus.ln() - 0.5 * lf[k];
            Complex64::from_polar(ln_mag.exp(), k as f64 * arg)
        })
        .collect()
}

/// `<k| S(xi) |alpha>` for `k = 0..=k_max` with `S(xi) = exp[(xi a^2† - xi* a^2)/2]`.
///
/// Uses `mu = cosh|xi|`, `nu = -e^{i arg xi} sinh|xi|`. The Hermite factor is
/// folded into the normalized recurrence
/// `g_{k+1} = ((alpha/mu) g_k - (nu/mu) sqrt(k) g_{k-1}) / sqrt(k+1)`,
/// which has no singularity as `xi -> 0`. A running log scale keeps large
/// amplitudes and tiny prefactors representable.
pub fn squeezed_fock_amplitudes(alpha: Complex64, xi: Complex64, k_max: usize) -> Vec<Complex64> {
    let r = xi.norm();
    if r < SQUEEZING_ZERO {
        return coherent_fock_amplitudes(alpha, k_max);
    }
    let mu = r.cosh();
    let nu = -Complex64::from_polar(r.sinh(), xi.arg());
    let ln_prefactor = -0.5 * (alpha.norm_sqr() - (nu.conj() / mu * alpha * alpha)) - 0.5 * mu.ln();

    const RESCALE: f64 = 1e100;
    let ratio = alpha / mu;
    let pair = nu / mu;
    let mut log_scale = ln_prefactor.re;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::from_polar(1.0, ln_prefactor.im);
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        out.push(cur * log_scale.exp());
        let next = (ratio * cur - pair * (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
        let big = cur.norm().max(prev.norm());
        if big > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        } else if big != 0.0 && big < 1.0 / RESCALE {
            prev *= RESCALE;
            cur *= RESCALE;
            log_scale -= RESCALE.ln();
        }
    }
    out
}

pub fn squeezed_fock_amplitude(alpha: Complex64, xi: Complex64, k: usize) -> Complex64 {
    squeezed_fock_amplitudes(alpha, xi, k)[k]
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Coherent product state with `|alpha_H| = |alpha_V| = r/sqrt(2)`:
/// `Psi_Nk = e^{-r^2/2} (r/sqrt 2)^N e^{i k phi_rel} / sqrt((N-k)! k!)`.
///
/// This is `|alpha_H> (x) |alpha_V>` with `alpha_V = (r/sqrt 2) e^{+i phi_rel}`; its
/// Wigner function peaks where `sin(theta) cos(phi + phi_rel) = 1`.
pub fn make_coherent_pair(r: f64, phi_rel: f64, n_max: usize) -> Result<PolarizationState> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("must be finite and >= 0, got {r}"),
        });
    }
    if !phi_rel.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phi_rel",
            reason: "not finite".into(),
        });
    }
    if r == 0.0 {
        let mut blocks: Vec<Vec<Complex64>> = (0..=n_max)
            .map(|n| vec![Complex64::new(0.0, 0.0); n + 1])
            .collect();
        blocks[0][0] = Complex64::new(1.0, 0.0);
        return PolarizationState::new(blocks, 0.0);
    }
    let lf = ln_factorials(n_max);
    let ln_amp = (r / std::f64::consts::SQRT_2).ln();
    let blocks = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let ln_mag = -0.5 * r * r + n as f64 * ln_amp - 0.5 * (lf[n - k] + lf[k]);
                    Complex64::from_polar(ln_mag.exp(), k as f64 * phi_rel)
                })
                .collect()
        })
        .collect();
    PolarizationState::new(blocks, poisson_tail(r * r, n_max))
}

/// Separable squeezed coherent state, `Psi_Nk = <N-k|alpha_H, xi_H> <k|alpha_V, xi_V>`.
pub fn make_squeezed_pair(
    alpha_h: Complex64,
    xi_h: Complex64,
    alpha_v: Complex64,
    xi_v: Complex64,
    n_max: usize,
) -> Result<PolarizationState> {
    let h = squeezed_fock_amplitudes(alpha_h, xi_h, n_max);
    let v = squeezed_fock_amplitudes(alpha_v, xi_v, n_max);
    let blocks = (0..=n_max)
        .map(|n| (0..=n).map(|k| h[n - k] * v[k]).collect())
        .collect();
    PolarizationState::from_blocks(blocks)
}

/// Two-mode squeezed vacuum, `Psi_Nk = delta_{N,2k} (1/mu) (-nu/mu)^k`.
pub fn make_tmsv(xi: Complex64, n_max: usize) -> Result<PolarizationState> {
    let r = xi.norm();
    let mu = r.cosh();
    let nu = Complex64::from_polar(r.sinh(), xi.arg());
    let step = -nu / mu;
    let mut blocks: Vec<Vec<Complex64>> = (0..=n_max)
        .map(|n| vec![Complex64::new(0.0, 0.0); n + 1])
        .collect();
    let mut amp = Complex64::new(1.0 / mu, 0.0);
    for k in 0..=n_max / 2 {
        blocks[2 * k][k] = amp;
        amp *= step;
    }
    let t2 = r.tanh().powi(2);
    let deficit = t2.powi((n_max / 2 + 1) as i32);
    PolarizationState::new(blocks, deficit)
}

/// Coherent product state after the cross-Kerr evolution `exp(i tau n_H n_V)`:
/// `Psi_Nk = e^{i tau (N-k) k} e^{-(|a_H|^2+|a_V|^2)/2} a_H^{N-k} a_V^k / sqrt((N-k)! k!)`.
pub fn make_kerr(
    alpha_h: Complex64,
    alpha_v: Complex64,
    tau: f64,
    n_max: usize,
) -> Result<PolarizationState> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: "not finite".into(),
        });
    }
    let h = coherent_fock_amplitudes(alpha_h, n_max);
    let v = coherent_fock_amplitudes(alpha_v, n_max);
    let blocks = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let phase = tau * ((n - k) * k) as f64;
                    h[n - k] * v[k] * Complex64::from_polar(1.0, phase)
                })
                .collect()
        })
        .collect();
    PolarizationState::new(
        blocks,
        poisson_tail(alpha_h.norm_sqr() + alpha_v.norm_sqr(), n_max),
    )
}

// ---------------------------------------------------------------------------
// JSON representation of complex numbers
// ---------------------------------------------------------------------------

pub(crate) mod json_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
        Parts {
            re: f64,
            #[serde(default)]
            im: f64,
        },
    }

    impl From<Repr> for Complex64 {
        fn from(r: Repr) -> Self {
            match r {
                Repr::Real(re) => Complex64::new(re, 0.0),
                Repr::Pair([re, im]) => Complex64::new(re, im),
                Repr::Parts { re, im } => Complex64::new(re, im),
            }
        }
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Repr::deserialize(d).map(Into::into)
    }

    pub mod blocks {
        use super::*;

        pub fn serialize<S: Serializer>(
            blocks: &[Vec<Complex64>],
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let pairs: Vec<Vec<[f64; 2]>> = blocks
                .iter()
                .map(|b| b.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Complex64>>, D::Error> {
            let raw: Vec<Vec<Repr>> = Vec::deserialize(d)?;
            Ok(raw
                .into_iter()
                .map(|b| b.into_iter().map(Into::into).collect())
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force Poisson tail: direct summation of pmf terms computed by
    /// repeated multiplication.
    fn brute_poisson_tail(mean: f64, n: usize) -> f64 {
        let mut p = (-mean).exp();
        let mut tail = 0.0;
        for j in 1..2000 {
            p *= mean / j as f64;
            if j > n {
                tail += p;
            }
        }
        tail
    }

    #[test]
    fn vacuum_truncations_are_zero() {
        let coherent = StateSpec::new(
            StateFamily::CoherentPair {
                r: 0.0,
                phi_rel: 1.0,
            },
            Truncation::Epsilon { epsilon: 1e-12 },
        );
        assert_eq!(suggest_truncation(&coherent, 1e-12).unwrap(), 0);
        let tmsv = StateSpec::new(
            StateFamily::TwoModeSqueezedVacuum { xi: c(0.0, 0.0) },
            Truncation::Epsilon { epsilon: 1e-12 },
        );
        assert_eq!(suggest_truncation(&tmsv, 1e-12).unwrap(), 0);
    }

    #[test]
    fn coherent_truncation_matches_brute_force_poisson_tail() {
        let spec = StateSpec::new(
            StateFamily::CoherentPair {
                r: 2.0,
                phi_rel: 0.0,
            },
            Truncation::Epsilon { epsilon: 1e-12 },
        );
        let n = suggest_truncation(&spec, 1e-12).unwrap();
        assert!(brute_poisson_tail(4.0, n) < 1e-12);
        assert!(brute_poisson_tail(4.0, n - 1) >= 1e-12);
        assert_eq!(n, 25);
    }

    #[test]
    fn truncation_rejects_bad_tolerance_and_cap() {
        let spec = StateSpec::new(
            StateFamily::CoherentPair {
                r: 1.0,
                phi_rel: 0.0,
            },
            Truncation::NMax { n_max: 3 },
        );
        assert_eq!(
            suggest_truncation(&spec, 0.0),
            Err(Error::InvalidTolerance(0.0))
        );
        assert_eq!(
            suggest_truncation(&spec, 1.0),
            Err(Error::InvalidTolerance(1.0))
        );
        let big = StateSpec::new(
            StateFamily::TwoModeSqueezedVacuum { xi: c(4.0, 0.0) },
            Truncation::Epsilon { epsilon: 1e-12 },
        );
        assert!(matches!(
            suggest_truncation(&big, 1e-12),
            Err(Error::TruncationCap { cap: 512, .. })
        ));
    }

    #[test]
    fn tmsv_truncation_is_minimal_even() {
        let t2 = 0.5f64.tanh().powi(2);
        let spec = StateSpec::new(
            StateFamily::TwoModeSqueezedVacuum { xi: c(0.5, 0.0) },
            Truncation::Epsilon { epsilon: 1e-10 },
        );
        let n = suggest_truncation(&spec, 1e-10).unwrap();
        assert_eq!(n % 2, 0);
        let k = n / 2;
        assert!(t2.powi(k as i32 + 1) < 1e-10);
        assert!(t2.powi(k as i32) >= 1e-10);
    }

    #[test]
    fn coherent_pair_vacuum_and_norm() {
        let vac = make_coherent_pair(0.0, 0.3, 4).unwrap();
        assert_eq!(vac.coeff(0, 0), c(1.0, 0.0));
        assert_eq!(vac.norm_sqr(), 1.0);

        // e^{-1} sum_{N<=n} 1/N!
        let s = make_coherent_pair(1.0, 0.0, 10).unwrap();
        let expected: f64 = (0..=10)
            .map(|n| (-1.0f64).exp() / (1..=n).map(|j| j as f64).product::<f64>())
            .sum();
        assert!((s.norm_sqr() - expected).abs() < 1e-15);
        assert!(((1.0 - s.norm_sqr()) - s.declared_norm_deficit()).abs() < 1e-14);
        assert!(make_coherent_pair(-1.0, 0.0, 3).is_err());
    }

    #[test]
    fn coherent_pair_single_photon_amplitudes() {
        let s = make_coherent_pair(1.0, FRAC_PI_2, 3).unwrap();
        let want = (-0.5f64).exp() / SQRT_2;
        assert!((s.coeff(1, 0).norm() - want).abs() < 1e-15);
        assert!((s.coeff(1, 1).norm() - want).abs() < 1e-15);
        // product of single-mode Poisson amplitudes
        let h = coherent_fock_amplitudes(c(1.0 / SQRT_2, 0.0), 1);
        let v = coherent_fock_amplitudes(Complex64::from_polar(1.0 / SQRT_2, FRAC_PI_2), 1);
        assert!((s.coeff(1, 1) - h[0] * v[1]).norm() < 1e-15);
        assert!((s.coeff(1, 0) - h[1] * v[0]).norm() < 1e-15);
    }

    #[test]
    fn squeezed_amplitude_edge_cases() {
        assert_eq!(
            squeezed_fock_amplitude(c(0.0, 0.0), c(0.0, 0.0), 0),
            c(1.0, 0.0)
        );
        for k in 1..5 {
            assert_eq!(
                squeezed_fock_amplitude(c(0.0, 0.0), c(0.0, 0.0), k),
                c(0.0, 0.0)
            );
        }
        // squeezed vacuum has no odd components
        let amps = squeezed_fock_amplitudes(c(0.0, 0.0), c(0.4, 0.2), 9);
        for k in (1..10).step_by(2) {
            assert!(amps[k].norm() < 1e-16);
        }
    }

    #[test]
    fn squeezed_amplitudes_stay_finite_for_large_amplitude() {
        let amps = squeezed_fock_amplitudes(c(30.0, 0.0), c(0.2, 0.0), 2000);
        assert!(amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let mass: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
    }

    #[test]
    fn squeezed_pair_without_squeezing_matches_coherent_pair() {
        let (r, phi) = (1.7, 0.9);
        let a = make_coherent_pair(r, phi, 30).unwrap();
        let b = make_squeezed_pair(
            c(r / SQRT_2, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(r / SQRT_2, phi),
            c(0.0, 0.0),
            30,
        )
        .unwrap();
        for (x, y) in a.blocks().iter().flatten().zip(b.blocks().iter().flatten()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn tmsv_structure_and_weights() {
        let s = make_tmsv(c(0.5, 0.0), 40).unwrap();
        let t = 0.5f64.tanh();
        for (n, block) in s.blocks().iter().enumerate() {
            for (k, z) in block.iter().enumerate() {
                if n % 2 == 1 || 2 * k != n {
                    assert_eq!(*z, c(0.0, 0.0));
                } else {
                    let want = (1.0 - t * t) * t.powi(2 * k as i32);
                    assert!((z.norm_sqr() - want).abs() < 1e-15);
                }
            }
        }
        assert_eq!(make_tmsv(c(0.0, 0.0), 6).unwrap().coeff(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn kerr_at_zero_time_is_the_coherent_pair() {
        let (r, phi) = (2.0, 0.7);
        let a = make_coherent_pair(r, phi, 30).unwrap();
        let b = make_kerr(
            c(r / SQRT_2, 0.0),
            Complex64::from_polar(r / SQRT_2, phi),
            0.0,
            30,
        )
        .unwrap();
        for (x, y) in a.blocks().iter().flatten().zip(b.blocks().iter().flatten()) {
            assert!((x - y).norm() < 1e-14);
        }
        let vac = make_kerr(c(0.0, 0.0), c(0.0, 0.0), 0.0, 3).unwrap();
        assert_eq!(vac.coeff(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn mean_excitation_cases() {
        assert_eq!(mean_excitation(&PolarizationState::vacuum()), 0.0);
        let photon =
            PolarizationState::from_blocks(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        assert_eq!(mean_excitation(&photon), 1.0);
        let coh = make_coherent_pair(2.0, 0.0, 60).unwrap();
        assert!((mean_excitation(&coh) - 4.0).abs() < 1e-12);
        let xi = 0.5f64;
        let tmsv = make_tmsv(c(xi, 0.0), 200).unwrap();
        assert!((mean_excitation(&tmsv) - 2.0 * xi.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        assert!(PolarizationState::from_blocks(vec![vec![c(2.0, 0.0)]]).is_err());
        assert!(PolarizationState::from_blocks(vec![vec![c(f64::NAN, 0.0)]]).is_err());
        assert!(
            PolarizationState::from_blocks(vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).is_err()
        );
        assert!(PolarizationState::new(vec![vec![c(0.5, 0.0)]], 0.1).is_err());
    }

    #[test]
    fn spec_json_forms() {
        let spec = StateSpec::from_json(
            r#"{"family":"SqueezedPair","params":{"alpha_h":5,"xi_h":[0.3,0],"alpha_v":{"re":5},"xi_v":0.3},"truncation":{"n_max":8}}"#,
        )
        .unwrap();
        assert_eq!(spec.truncation, Some(Truncation::NMax { n_max: 8 }));
        assert!(
            matches!(spec.family, StateFamily::SqueezedPair { alpha_v, .. } if alpha_v == c(5.0, 0.0))
        );

        let spec = StateSpec::from_json(r#"{"family":"TwoModeSqueezedVacuum","params":{"xi":0.5},"truncation":{"epsilon":1e-10}}"#).unwrap();
        assert_eq!(
            spec.truncation,
            Some(Truncation::Epsilon { epsilon: 1e-10 })
        );

        let spec = StateSpec::from_json(r#"{"family":"Explicit","params":{"coeffs":[[0],[1,0]]}}"#)
            .unwrap();
        let st = spec.build().unwrap();
        assert_eq!(st.coeff(1, 0), c(1.0, 0.0));

        assert!(StateSpec::from_json(r#"{"family":"Nope","params":{}}"#).is_err());
        let bad_eps = StateSpec::from_json(
            r#"{"family":"CoherentPair","params":{"r":1,"phi_rel":0},"truncation":{"epsilon":2}}"#,
        )
        .unwrap();
        assert_eq!(bad_eps.build(), Err(Error::InvalidTolerance(2.0)));
    }
}
