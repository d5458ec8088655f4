//! Pseudo-spectral projection against the classical collapsed-quadrature
//! projection on the same nodes: PSP recovers every basis polynomial of
//! K(l) exactly, NISP aliases.

use biot_uq::quadrature::{nisp_project, psp_project, ModelEvaluations, SparseGrid};

fn main() -> biot_uq::Result<()> {
    let grid = SparseGrid::new(2, 3)?;
    let basis = grid.admissible_set().clone();
    println!("N = 2, l = 3: {} nodes, {} modes", grid.n_nodes(), basis.len());

    let (mut psp_err, mut nisp_err) = (0.0f64, 0.0f64);
    let mut worst = None;
    for (pos, target) in basis.members().iter().enumerate() {
        let evals = ModelEvaluations::from_payloads(grid.nodes().iter().map(|x| vec![target.eval(x).unwrap()]).collect());
        let psp = psp_project(&grid, &evals)?;
        let nisp = nisp_project(&grid, &evals, &basis)?;
        for m in 0..basis.len() {
            let exact = if m == pos { 1.0 } else { 0.0 };
            psp_err = psp_err.max((psp.mode(m)[0] - exact).abs());
            let e = (nisp.mode(m)[0] - exact).abs();
            if e > nisp_err {
                nisp_err = e;
                worst = Some((target.clone(), basis.members()[m].clone()));
            }
        }
    }
    println!("max coefficient error: PSP {psp_err:.1e}, NISP {nisp_err:.3}");
    if let Some((from, to)) = worst {
        println!("worst NISP alias: {:?} leaks into {:?}", from.degrees(), to.degrees());
    }
    Ok(())
}
