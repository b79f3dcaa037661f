//! Cross-Kerr evolution of a coherent pair splits the Wigner peak.
use std::f64::consts::{FRAC_PI_2, SQRT_2};

use num_complex::Complex64;
use polarq::{
    evaluate_field, mean_excitation, normalized_field, FieldKind, SphericalGrid, StateFamily,
    StateSpec, Truncation,
};

fn main() -> polarq::Result<()> {
    let grid = SphericalGrid::default();
    let a = Complex64::new(5.0 / SQRT_2, 0.0);
    for tau in [0.0, FRAC_PI_2 / 4.0, FRAC_PI_2 / 2.0, FRAC_PI_2] {
        let spec = StateSpec::new(
            StateFamily::KerrEvolved {
                alpha_h: a,
                alpha_v: a,
                tau,
            },
            Truncation::Epsilon { epsilon: 1e-10 },
        );
        let state = spec.build()?;
        let w = evaluate_field(&state, &grid, FieldKind::Wigner)?;
        let f = normalized_field(&w, mean_excitation(&state))?;
        let (_, theta, phi, top) = f.maximum();
        let spread = f.values.iter().filter(|&&v| v > 1.2).count() as f64 / f.values.len() as f64;
        println!("tau = {tau:.4}: max f = {top:.4} at ({theta:.3}, {phi:.3}), fraction of nodes with f > 1.2 = {spread:.3}");
    }
    Ok(())
}
