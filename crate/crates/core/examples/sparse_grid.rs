//! Smolyak grids of nested Clenshaw-Curtis rules: node counts, the admissible
//! projection set, and a quadrature check.

use biot_uq::quadrature::{cc_size, degree_cap, SparseGrid};

fn main() -> biot_uq::Result<()> {
    println!("1D level  points  degree cap");
    for i in 0..6 {
        println!("{i:>8} {:>7} {:>11}", cc_size(i), degree_cap(i));
    }

    println!("\nN = 4:");
    for l in 0..=5 {
        let g = SparseGrid::new(4, l)?;
        println!(
            "  l = {l}: {:>5} nodes, {:>3} tensor rules, |K(l)| = {}",
            g.n_nodes(),
            g.tensors().len(),
            g.admissible_set().len()
        );
    }

    // E[exp(xi_1 + xi_2)/4] over U(-1,1)^2 is (sinh 1)^2 / 4
    let exact = 1f64.sinh().powi(2) / 4.0;
    for l in 1..=5 {
        let g = SparseGrid::new(2, l)?;
        let est: f64 = g
            .global_weights()
            .iter()
            .zip(g.nodes())
            .map(|(w, x)| w * (x[0] + x[1]).exp() / 4.0)
            .sum();
        println!(
            "l = {l}: mean of exp(xi_1 + xi_2)/4 = {est:.14} (error {:.1e})",
            (est - exact).abs()
        );
    }
    Ok(())
}
