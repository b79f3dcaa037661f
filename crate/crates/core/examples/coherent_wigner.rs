//! Wigner function of a coherent pair, summed and in closed form.
use std::f64::consts::FRAC_PI_2;

use polarq::{
    coherent_wigner_closed, evaluate_field, integrate, FieldKind, SphericalGrid, StateFamily,
    StateSpec, Truncation,
};

fn main() -> polarq::Result<()> {
    let (r, phi_rel) = (2.0, FRAC_PI_2);
    let spec = StateSpec::new(
        StateFamily::CoherentPair { r, phi_rel },
        Truncation::Epsilon { epsilon: 1e-12 },
    );
    let state = spec.build()?;
    let grid = SphericalGrid::new(32, 64)?;
    let w = evaluate_field(&state, &grid, FieldKind::Wigner)?;

    let worst = grid
        .nodes()
        .zip(&w.values)
        .map(|(n, v)| (v - coherent_wigner_closed(r, phi_rel, n.theta, n.phi)).abs())
        .fold(0.0, f64::max);
    let (_, theta, phi, peak) = w.maximum();
    println!("n_max = {}", state.n_max());
    println!("integral = {:.12}", integrate(&w));
    println!("max |sum - closed form| = {worst:.2e}");
    println!("peak W = {peak:.4} at theta = {theta:.4}, phi = {phi:.4}");
    Ok(())
}
