//! Injection-extraction through two unit-well problems: each campaign sample
//! is a linear combination of the two, checked against the direct solve.

use biot_uq::coefficients::{sample_params, UncertaintyModel};
use biot_uq::driver::solve_superposed;
use biot_uq::fem::{BiotCoefficients, BiotSolver, Scenario};

fn main() -> biot_uq::Result<()> {
    let mut s = Scenario::injection_extraction(5, [[0.8, 1.2, 0.4, 0.6], [2.8, 3.2, 0.4, 0.6]])?;
    s.t_final = 5.0;
    s.steps = 5;
    let model = UncertaintyModel::realistic();
    for xi in [[0.0; 4], [0.7, -0.2, -0.9, 0.4]] {
        let c = BiotCoefficients::from(&sample_params(&xi, &model)?);
        let direct = BiotSolver::new(&s, c)?.solve_transient()?;
        let superposed = solve_superposed(&s, c, ["well1", "well2"])?;
        let scale = direct.last().unwrap().values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let diff = direct
            .iter()
            .zip(&superposed)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max);
        println!("xi = {xi:?}: max |direct - superposed| / max |x| = {:.1e}", diff / scale);
    }
    Ok(())
}
