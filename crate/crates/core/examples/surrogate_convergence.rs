//! Surrogate error against exact solves at Latin-hypercube points, over a
//! range of grid levels. Node solves are shared between the nested grids.

use biot_uq::coefficients::UncertaintyModel;
use biot_uq::driver::{convergence_sweep, stubs, BiotModel, ValidationSet};
use biot_uq::fem::Scenario;

fn main() -> biot_uq::Result<()> {
    // analytic payload exp(sum xi / 4)
    let m = stubs::exponential();
    let set = ValidationSet::draw(&m, 500, 2024, 0)?;
    let sweep = convergence_sweep(&m, &[1, 2, 3, 4, 5], &set, 0)?;
    print!("{}", sweep.to_csv());
    println!("slope of log10 MSE per level: {:.3}\n", sweep.log_slope(0));

    let model = BiotModel::new(Scenario::injection(8)?, UncertaintyModel::validation())?;
    let set = ValidationSet::draw(&model, 100, 7, 0)?;
    let sweep = convergence_sweep(&model, &[1, 2, 3], &set, 0)?;
    print!("{}", sweep.to_csv());
    println!("slopes: u {:.3}, p {:.3}", sweep.log_slope(0), sweep.log_slope(1));
    Ok(())
}
