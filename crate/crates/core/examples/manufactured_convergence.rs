//! Solver verification with manufactured solutions: spatial and temporal
//! convergence tables and an exactly reproduced polynomial solution.

use biot_uq::fem::manufactured::verification_coefficients;
use biot_uq::fem::{space_convergence, time_convergence, BiotCoefficients, Manufactured};

fn main() -> biot_uq::Result<()> {
    let c = verification_coefficients();
    println!("coefficients: {}", c.digest());

    println!("\nspace (one implicit Euler step, theta linear in t):");
    print!(
        "{}",
        space_convergence(&Manufactured::smooth(), c, &[4, 8, 16, 32], 1.0, 1)?.to_csv()
    );

    println!("\ntime (self-convergence on a 6x6 mesh):");
    print!(
        "{}",
        time_convergence(&Manufactured::smooth_in_time(), c, 6, 1.0, &[4, 8, 16, 32, 64])?.to_csv()
    );

    let ms = Manufactured::polynomial();
    let (s, states) = ms.solve(5, c, 1.0, 3)?;
    println!("\npolynomial solution, max nodal error {:.1e}", ms.max_nodal_error(&s, &states));

    // strong Darcy coupling: P1 pressure gradients limit the displacement rate
    let coupled = BiotCoefficients {
        mu: 1.0,
        lambda: 2.0,
        alpha: 0.7,
        kappa: 0.5,
        c0: 0.3,
    };
    println!("\nstrongly coupled regime:");
    print!(
        "{}",
        space_convergence(&Manufactured::smooth(), coupled, &[8, 16, 32], 1.0, 1)?.to_csv()
    );
    Ok(())
}
