//! Discrete energy against the data bound along a transient solve, for a
//! few coefficient samples.

use biot_uq::coefficients::{sample_params, UncertaintyModel};
use biot_uq::fem::{energy_diagnostic, BiotCoefficients, BiotSolver, Scenario};

fn main() -> biot_uq::Result<()> {
    let model = UncertaintyModel::validation();
    let s = Scenario::footing(10)?;
    println!("{:>24} {:>12} {:>12} {:>8}", "xi", "energy", "data", "ratio");
    for xi in [[0.0; 4], [-1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, 1.0], [0.5, -0.3, 0.2, 0.9]] {
        let c = BiotCoefficients::from(&sample_params(&xi, &model)?);
        let solver = BiotSolver::new(&s, c)?;
        let states = solver.solve_transient()?;
        let r = energy_diagnostic(&solver, &s, &states, 1.0)?;
        println!("{:>24} {:>12.4e} {:>12.4e} {:>8.4}", format!("{xi:?}"), r.energy, r.data, r.ratio());
    }
    Ok(())
}
