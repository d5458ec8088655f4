use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use super::campaign::{CampaignResult, Statistics};
use super::model::BiotModel;
use super::validation::MseReport;
use crate::error::{Error, Result};
use crate::fem::output::{csv_string, vtk_string, write_text};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes files into one directory and records their digests.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_text(&path, text)?;
        self.files.insert(name.into(), sha256_hex(text.as_bytes()));
        Ok(path)
    }

    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.files
    }

    /// Writes `manifest.json`: `meta` plus the file digests.
    pub fn finish(self, mut meta: serde_json::Value) -> Result<PathBuf> {
        meta["files"] = json!(self.files);
        let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Internal(format!("manifest: {e}")))? + "\n";
        let path = self.dir.join("manifest.json");
        write_text(&path, &text)?;
        Ok(path)
    }
}

/// Mode tables, one per output field, at every output time.
pub fn export_modes(w: &mut ArtifactWriter, result: &CampaignResult) -> Result<()> {
    let multi = result.times.len() > 1;
    for k in 0..result.times.len() {
        let block = result.time_block(k);
        for f in &result.layout.fields {
            let name = if multi {
                format!("modes_{}_step{:03}.csv", f.name, k + 1)
            } else {
                format!("modes_{}.csv", f.name)
            };
            w.write(&name, &block.slice(f.offset..f.offset + f.len).to_csv())?;
        }
    }
    Ok(())
}

fn vertex_columns(stats: &Statistics, nv: usize) -> Vec<(String, Vec<f64>)> {
    let mut cols = Vec::new();
    for (n, v) in &stats.mean {
        cols.push((format!("mean_{n}"), v[..nv].to_vec()));
    }
    for (n, v) in &stats.variance {
        cols.push((format!("var_{n}"), v[..nv].to_vec()));
    }
    for (a, b, v) in &stats.covariance {
        cols.push((format!("cov_{a}_{b}"), v.clone()));
    }
    cols
}

/// Statistic fields on mesh vertices: VTK on the mean-deformed geometry and CSV.
pub fn export_statistics(w: &mut ArtifactWriter, model: &BiotModel, result: &CampaignResult, scale: f64) -> Result<()> {
    let mesh = model.scenario.mesh();
    let nv = mesh.n_vertices();
    let multi = result.times.len() > 1;
    for k in 0..result.times.len() {
        let stats = result.statistics(k)?;
        let cols = vertex_columns(&stats, nv);
        let fields: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
        let mu1 = &cols[0].1;
        let mu2 = &cols[1].1;
        let stem = if multi {
            format!("statistics_step{:03}", k + 1)
        } else {
            "statistics".into()
        };
        let title = format!("{} statistics at t = {}", model.scenario.name, stats.time);
        w.write(
            &format!("{stem}.vtk"),
            &vtk_string(mesh, &title, &fields, Some(([mu1, mu2], scale)))?,
        )?;
        w.write(&format!("{stem}.csv"), &csv_string(mesh, &fields)?)?;
    }
    Ok(())
}

/// MSE field on mesh vertices.
pub fn export_mse(w: &mut ArtifactWriter, model: &BiotModel, result: &CampaignResult, report: &MseReport) -> Result<()> {
    let mesh = model.scenario.mesh();
    let nv = mesh.n_vertices();
    let cols: Vec<(String, Vec<f64>)> = result
        .layout
        .fields
        .iter()
        .map(|f| (format!("mse_{}", f.name), report.mse[f.offset..f.offset + nv].to_vec()))
        .collect();
    let fields: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
    let title = format!("{} mean squared error, level {}", model.scenario.name, report.level);
    w.write(&format!("mse_l{}.vtk", report.level), &vtk_string(mesh, &title, &fields, None)?)?;
    w.write(&format!("mse_l{}.csv", report.level), &csv_string(mesh, &fields)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ChaosExpansion;
    use crate::coefficients::UncertaintyModel;
    use crate::driver::campaign::run_campaign;
    use crate::fem::Scenario;

    #[test]
    fn digest_of_known_string() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn exported_modes_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let m = BiotModel::new(Scenario::injection(3).unwrap(), UncertaintyModel::validation()).unwrap();
        let r = run_campaign(&m, 1, 2).unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        export_modes(&mut w, &r).unwrap();
        export_statistics(&mut w, &m, &r, 10.0).unwrap();
        let text = std::fs::read_to_string(dir.path().join("modes_p.csv")).unwrap();
        let back = ChaosExpansion::from_csv(&text).unwrap();
        let p = r.field("p").unwrap();
        // the CSV carries members, not the truncation rule that produced them
        assert_eq!(back.basis().members(), p.basis().members());
        assert_eq!(back.coefficients(), p.coefficients());
        let vtk = std::fs::read_to_string(dir.path().join("statistics.vtk")).unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version") && vtk.contains("UNSTRUCTURED_GRID"));
        assert!(vtk.contains("SCALARS cov_u1_p double 1"));
        let manifest = w.finish(json!({"level": 1})).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
        assert_eq!(v["files"]["modes_p.csv"], sha256_hex(text.as_bytes()));
    }
}
