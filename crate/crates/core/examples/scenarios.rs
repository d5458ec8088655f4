//! The three deterministic test problems at mean coefficients, written as
//! legacy VTK with vertex fields on the deformed mesh.
//!
//! `cargo run --release --example scenarios -- [out_dir]`

use std::path::{Path, PathBuf};

use biot_uq::coefficients::{sample_params, UncertaintyModel};
use biot_uq::fem::output::{vtk_string, write_text};
use biot_uq::fem::{BiotCoefficients, BiotSolver, FieldSolution, Scenario};

fn mean(model: &UncertaintyModel) -> biot_uq::Result<BiotCoefficients> {
    Ok(BiotCoefficients::from(&sample_params(&[0.0; 4], model)?))
}

fn write(dir: &Path, s: &Scenario, st: &FieldSolution, scale: f64) -> biot_uq::Result<()> {
    let disc = s.discretization();
    let [u1, u2, p] = st.vertex_fields(disc);
    let fields: [(&str, &[f64]); 3] = [("u1", &u1), ("u2", &u2), ("p", &p)];
    let pmax = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let title = format!("{} at t = {}", s.name, st.time);
    let path = dir.join(format!("{}.vtk", s.name));
    write_text(&path, &vtk_string(s.mesh(), &title, &fields, Some(([&u1, &u2], scale)))?)?;
    println!("{:<22} t = {:<6} max|p| = {pmax:.3e}  -> {}", s.name, st.time, path.display());
    Ok(())
}

fn main() -> biot_uq::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("biot-uq-scenarios"), PathBuf::from);

    let s = Scenario::injection(16)?;
    let states = BiotSolver::new(&s, mean(&UncertaintyModel::validation())?)?.solve_transient()?;
    write(&dir, &s, states.last().unwrap(), 1.0)?;

    let s = Scenario::footing(20)?;
    let states = BiotSolver::new(&s, mean(&UncertaintyModel::validation())?)?.solve_transient()?;
    write(&dir, &s, &states[1], 1.0)?;

    let s = Scenario::injection_extraction(10, Scenario::DEFAULT_WELLS)?;
    let st = BiotSolver::steady(&s, mean(&UncertaintyModel::realistic())?)?.solve_steady(1.0)?;
    write(&dir, &s, &st, 1e5)?;
    Ok(())
}
