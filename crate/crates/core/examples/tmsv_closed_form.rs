//! Two-mode squeezed vacuum: azimuthal symmetry and the belt-to-pole contrast.
use std::f64::consts::PI;

use num_complex::Complex64;
use polarq::{make_tmsv, tmsv_wigner_closed, wigner_value, WignerMethod};

fn main() -> polarq::Result<()> {
    let xi = Complex64::new(0.5, 0.0);
    let state = make_tmsv(xi, 60)?;
    println!("{:>8} {:>14} {:>14}", "theta", "W (sum)", "W (closed)");
    for i in 0..=8 {
        let theta = PI * i as f64 / 8.0;
        let w = wigner_value(&state, theta, 1.0, WignerMethod::TripleSum)?;
        println!(
            "{theta:>8.4} {w:>14.10} {:>14.10}",
            tmsv_wigner_closed(xi, theta)
        );
    }
    let t2 = xi.norm().tanh().powi(2);
    let belt = wigner_value(&state, PI / 2.0, 0.0, WignerMethod::TripleSum)?;
    let pole = wigner_value(&state, 0.0, 0.0, WignerMethod::TripleSum)?;
    println!(
        "belt/pole = {:.10}, [(1+t^2)/(1-t^2)]^3 = {:.10}",
        belt / pole,
        ((1.0 + t2) / (1.0 - t2)).powi(3)
    );
    Ok(())
}
