//! A PSP campaign on the injection problem: node solves, statistics fields,
//! Sobol partial variances and exported artifacts.
//!
//! `cargo run --release --example campaign -- [level] [out_dir]`

use std::path::PathBuf;

use biot_uq::coefficients::UncertaintyModel;
use biot_uq::driver::export::{export_modes, export_statistics};
use biot_uq::driver::{run_campaign, sensitivity_report, ArtifactWriter, BiotModel, Statistics};
use biot_uq::fem::Scenario;

fn main() -> biot_uq::Result<()> {
    let level: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let dir: PathBuf = std::env::args()
        .nth(2)
        .map_or_else(|| std::env::temp_dir().join("biot-uq-campaign"), PathBuf::from);

    let model = BiotModel::new(Scenario::injection(12)?, UncertaintyModel::validation())?;
    let r = run_campaign(&model, level, 0)?;
    println!(
        "level {level}: {} solves, {} modes, payload width {}",
        r.n_nodes,
        r.expansion.n_modes(),
        r.expansion.width()
    );

    let stats = r.statistics(0)?;
    let disc = model.scenario.discretization();
    let nv = disc.dofs().n_vertices;
    let dist = |x: &[f64; 2]| (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
    let verts = disc.mesh().vertices();
    let v = (0..nv).min_by(|&a, &b| dist(&verts[a]).total_cmp(&dist(&verts[b]))).unwrap();
    for name in ["u1", "u2", "p"] {
        let m = Statistics::get(&stats.mean, name).unwrap();
        let var = Statistics::get(&stats.variance, name).unwrap();
        println!(
            "  {name}: mean {:+.4e}, std {:.4e} at vertex {v} near (0.5, 0.5)",
            m[v],
            var[v].sqrt()
        );
    }

    let p = r.field("p")?;
    let s = sensitivity_report(&p.slice(0..nv), "p")?;
    let total: f64 = s.variance.iter().sum();
    for i in 0..4 {
        let f: f64 = s.first[i].iter().sum();
        let t: f64 = s.total[i].iter().sum();
        println!("  p sensitivity to xi_{}: first {:.3}, total {:.3}", i + 1, f / total, t / total);
    }

    let mut w = ArtifactWriter::new(&dir)?;
    export_modes(&mut w, &r)?;
    export_statistics(&mut w, &model, &r, 1.0)?;
    for (name, digest) in w.digests() {
        println!("  {name} {}", &digest[..16]);
    }
    println!("manifest {}", w.finish(serde_json::json!({"level": level}))?.display());
    Ok(())
}
