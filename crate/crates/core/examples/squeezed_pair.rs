//! Squeezed coherent light in both polarization modes.
use num_complex::Complex64;
use polarq::{
    evaluate_field, integrate, mean_excitation, squeezed_fock_amplitude, FieldKind, SphericalGrid,
    StateFamily, StateSpec, Truncation,
};

fn main() -> polarq::Result<()> {
    let alpha = Complex64::new(1.0, 0.0);
    let xi = Complex64::new(0.3, 0.0);
    println!("single-mode photon-number distribution, alpha = 1, xi = 0.3:");
    for k in 0..8 {
        println!(
            "  P({k}) = {:.6}",
            squeezed_fock_amplitude(alpha, xi, k).norm_sqr()
        );
    }

    let spec = StateSpec::new(
        StateFamily::SqueezedPair {
            alpha_h: Complex64::new(2.0, 0.0),
            xi_h: xi,
            alpha_v: Complex64::new(0.0, 2.0),
            xi_v: -xi,
        },
        Truncation::Epsilon { epsilon: 1e-12 },
    );
    let state = spec.build()?;
    let grid = SphericalGrid::new(32, 64)?;
    let w = evaluate_field(&state, &grid, FieldKind::Wigner)?;
    let q = evaluate_field(&state, &grid, FieldKind::Q)?;
    println!(
        "n_max = {}, <N> = {:.6}",
        state.n_max(),
        mean_excitation(&state)
    );
    println!(
        "integral W = {:.12}, integral Q = {:.12}",
        integrate(&w),
        integrate(&q)
    );
    println!("min W = {:.3e}, min Q = {:.3e}", w.minimum(), q.minimum());
    Ok(())
}
