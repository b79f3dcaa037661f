//! The s-ordered kernel built by matrix exponentiation, used as an independent
//! check on the fast sums and to evaluate intermediate orderings.
use num_complex::Complex64;
use polarq::{
    kernel_matrix, make_coherent_pair, q_value, quasidist_via_kernel, wigner_value, WignerMethod,
};

fn main() -> polarq::Result<()> {
    let state = make_coherent_pair(1.5, 0.4, 20)?;
    let (theta, phi) = (1.1, 5.2);
    println!(
        "W: sum {:.15}, kernel {:.15}",
        wigner_value(&state, theta, phi, WignerMethod::TripleSum)?,
        quasidist_via_kernel(&state, 0.0, theta, phi)?
    );
    println!(
        "Q: sum {:.15}, kernel {:.15}",
        q_value(&state, theta, phi),
        quasidist_via_kernel(&state, -1.0, theta, phi)?
    );
    for s in [-1.0, -0.75, -0.5, -0.25, 0.0] {
        println!(
            "s = {s:>5}: W^(s) = {:.10}",
            quasidist_via_kernel(&state, s, theta, phi)?
        );
    }

    let k = kernel_matrix(0.0, theta, phi, 6)?.to_dense();
    let herm = k
        .iter()
        .zip(k.t().iter())
        .fold(0.0f64, |m, (a, b): (&Complex64, &Complex64)| {
            m.max((a - b.conj()).norm())
        });
    println!(
        "kernel dimension {}, max |K - K^dagger| = {herm:.1e}",
        k.nrows()
    );
    Ok(())
}
