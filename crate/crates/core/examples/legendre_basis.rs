//! Orthonormal Legendre chaos: basis values, moments and Sobol partial
//! variances of a small hand-built expansion.

use biot_uq::basis::{legendre_1d, ChaosExpansion, MultiIndex, SobolKind};

fn main() -> biot_uq::Result<()> {
    for k in 0..5 {
        println!("phi_{k}(0.5) = {:+.6}", legendre_1d(k, 0.5));
    }

    // f = 2 + 1.5 phi_1(xi_1) + 0.5 phi_1(xi_1) phi_2(xi_2)
    let f = ChaosExpansion::from_scalar_modes(
        2,
        &[
            (MultiIndex::zero(2), 2.0),
            (MultiIndex::new(vec![1, 0]), 1.5),
            (MultiIndex::new(vec![1, 2]), 0.5),
        ],
    )?;
    println!("{} modes, mean {}, variance {}", f.n_modes(), f.mean()[0], f.variance()[0]);
    for i in 0..2 {
        let first = f.sobol_partial_variance(i, SobolKind::First)?[0];
        let total = f.sobol_partial_variance(i, SobolKind::Total)?[0];
        println!("xi_{}: first {first:.3}, total {total:.3}", i + 1);
    }
    println!("f(0.3, -0.7) = {:.6}", f.evaluate(&[0.3, -0.7])?[0]);
    Ok(())
}
