//! Wigner d-function tables: unitarity and the half-turn at large N.
use std::f64::consts::PI;

use ndarray::Array2;
use polarq::{wigner_d, wigner_d_table};

fn main() -> polarq::Result<()> {
    println!(
        "d^1(0.9) = [[{:.6}, {:.6}], [{:.6}, {:.6}]]",
        wigner_d(1, 0, 0, 0.9)?,
        wigner_d(1, 0, 1, 0.9)?,
        wigner_d(1, 1, 0, 0.9)?,
        wigner_d(1, 1, 1, 0.9)?
    );

    for theta in [0.3, 1.7, PI] {
        let table = wigner_d_table(200, theta);
        let worst = (0..=200)
            .map(|n| {
                let d = table.block(n);
                (d.t().dot(d) - Array2::<f64>::eye(n + 1))
                    .iter()
                    .fold(0.0f64, |m, x| m.max(x.abs()))
            })
            .fold(0.0, f64::max);
        println!("theta = {theta:.4}: max |d^T d - 1| over N <= 200 = {worst:.2e}");
    }
    let half = wigner_d_table(7, PI);
    println!(
        "d^7(pi) row 0: {:?}",
        half.block(7)
            .row(0)
            .mapv(|x| (x * 1e12).round() / 1e12)
            .to_vec()
    );
    Ok(())
}
