//! Gauss-Legendre x trapezoid quadrature on the sphere.
use polarq::grid::gauss_legendre;
use polarq::SphericalGrid;

fn main() -> polarq::Result<()> {
    for (x, w) in gauss_legendre(4) {
        println!("node {x:+.15}  weight {w:.15}");
    }
    let grid = SphericalGrid::default();
    let area: f64 = grid.nodes().map(|n| n.weight).sum();
    println!(
        "{} nodes, total weight / 4 pi = {:.15}",
        grid.len(),
        area / (4.0 * std::f64::consts::PI)
    );
    // P_30(cos theta) averages to zero over the sphere; its square integrates to 4 pi / 61
    let p30 = |x: f64| {
        let (mut a, mut b) = (1.0, x);
        for l in 1..30 {
            (a, b) = (
                b,
                ((2 * l + 1) as f64 * x * b - l as f64 * a) / (l + 1) as f64,
            );
        }
        b
    };
    let mean: f64 = grid.nodes().map(|n| n.weight * p30(n.theta.cos())).sum();
    let sq: f64 = grid
        .nodes()
        .map(|n| n.weight * p30(n.theta.cos()).powi(2))
        .sum();
    println!(
        "int P30 = {mean:.2e}, int P30^2 = {sq:.15} (exact {:.15})",
        4.0 * std::f64::consts::PI / 61.0
    );
    Ok(())
}
