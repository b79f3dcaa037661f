//! Polarization quasidistributions on the Poincaré sphere.
//!
//! Two-mode optical states are expanded in the invariant subspaces
//! `|N, k> = |N - k>_H (x) |k>_V` of fixed total excitation number. From that
//! expansion the crate evaluates
//!
//! * the Husimi function `Q(theta, phi)` as a weighted sum of SU(2)
//!   coherent-state projections,
//! * the Wigner function `W(theta, phi)` through either a triple or a double
//!   sum over Wigner d-functions,
//! * the normalized distribution `f = 1 + W / <N>` used for sphere plots,
//!
//! together with closed forms for coherent and two-mode squeezed vacuum
//! states and a brute-force kernel evaluator on truncated Fock space that
//! fixes every sign convention independently of the fast sums.
//!
//! ```
//! use polarq::{make_coherent_pair, wigner_value, coherent_wigner_closed, WignerMethod};
//!
//! let state = make_coherent_pair(2.0, 0.5, 30).unwrap();
//! let w = wigner_value(&state, 1.2, 0.3, WignerMethod::TripleSum).unwrap();
//! assert!((w - coherent_wigner_closed(2.0, 0.5, 1.2, 0.3)).abs() < 1e-8);
//! ```

pub mod cli;
pub mod error;
pub mod expm;
pub mod grid;
pub mod kernel;
pub mod quasidist;
pub mod state;
pub mod su2;
pub mod sum;

pub use error::{Error, Result};
pub use grid::{GridNode, SphericalGrid};
pub use kernel::{kernel_matrix, quasidist_via_kernel, TruncatedKernel};
pub use quasidist::{
    coherent_wigner_closed, evaluate_field, evaluate_field_with, integrate, normalized_field,
    q_value, tmsv_wigner_closed, wigner_value, wigner_value_detailed, DistributionField, FieldKind,
    FieldOptions, WignerMethod,
};
pub use state::{
    make_coherent_pair, make_kerr, make_squeezed_pair, make_tmsv, mean_excitation,
    squeezed_fock_amplitude, suggest_truncation, PolarizationState, StateFamily, StateSpec,
    Truncation,
};
pub use su2::{
    rotation_matrix_oracle, su2_coherent_amplitudes, wigner_d, wigner_d_table, Su2CoherentVector,
    WignerDTable,
};
