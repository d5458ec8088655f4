//! End-to-end commands: each builds the model from a config, runs, and writes
//! artifacts plus a manifest into the output directory.

use std::path::{Path, PathBuf};

use serde_json::json;

use super::campaign::{run_campaign, CampaignResult};
use super::config::CampaignConfig;
use super::export::{export_modes, export_mse, export_statistics, ArtifactWriter};
use super::model::{BiotModel, SampleModel};
use super::sensitivity::sensitivity_report;
use super::validation::{convergence_sweep, mse_field, ConvergenceSweep, MseReport, ValidationSet};
use crate::error::Result;

/// Command-line overrides of config values.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub level: Option<usize>,
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, c: &mut CampaignConfig) {
        if let Some(l) = self.level {
            c.level = l;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(p) = self.parallelism {
            c.parallelism = p;
        }
        if let Some(o) = &self.out {
            c.out = Some(o.clone());
        }
    }
}

/// Loaded config and model, ready to run.
pub struct Session {
    pub config: CampaignConfig,
    pub model: BiotModel,
    pub out: PathBuf,
}

impl Session {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let (mut config, base) = CampaignConfig::load(path)?;
        overrides.apply(&mut config);
        config.check()?;
        let model = config.build_model(&base)?;
        // overrides.out is relative to the working directory, the config's to its file
        let out = match &overrides.out {
            Some(o) => o.clone(),
            None => config.out_dir(&base),
        };
        Ok(Session { config, model, out })
    }

    pub fn from_config(config: CampaignConfig, base: &Path) -> Result<Self> {
        config.check()?;
        let model = config.build_model(base)?;
        let out = config.out_dir(base);
        Ok(Session { config, model, out })
    }

    fn meta(&self, command: &str) -> serde_json::Value {
        let c = &self.config;
        let d = self.model.scenario.discretization().dofs();
        json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "scenario": self.model.scenario.name,
            "model": self.model.model,
            "level": c.level,
            "seed": c.seed,
            "validation_samples": c.validation_samples,
            "output_times": c.output_times,
            "times": self.model.times(),
            "deformation_scale": c.deformation_scale,
            "superposition": c.superposition,
            "mesh": {
                "vertices": d.n_vertices,
                "edges": d.n_edges,
                "triangles": self.model.scenario.mesh().n_triangles(),
            },
        })
    }

    fn campaign(&self, meta: &mut serde_json::Value) -> Result<CampaignResult> {
        let r = run_campaign(&self.model, self.config.level, self.config.parallelism)?;
        meta["n_nodes"] = json!(r.n_nodes);
        meta["n_modes"] = json!(r.expansion.n_modes());
        meta["dim"] = json!(r.expansion.dim());
        Ok(r)
    }

    /// Campaign: mode tables and statistic fields.
    pub fn run(&self) -> Result<(CampaignResult, PathBuf)> {
        let mut meta = self.meta("run");
        let r = self.campaign(&mut meta)?;
        let mut w = ArtifactWriter::new(&self.out)?;
        export_modes(&mut w, &r)?;
        export_statistics(&mut w, &self.model, &r, self.config.deformation_scale)?;
        Ok((r, w.finish(meta)?))
    }

    fn validation_set(&self, meta: &mut serde_json::Value) -> Result<ValidationSet> {
        let set = ValidationSet::draw(
            &self.model,
            self.config.validation_samples,
            self.config.seed,
            self.config.parallelism,
        )?;
        meta["n_excluded"] = json!(set.excluded.len());
        meta["excluded"] = json!(set.excluded);
        Ok(set)
    }

    /// Campaign plus the MSE field against exact solves at N* LHS points.
    pub fn validate(&self) -> Result<(MseReport, PathBuf)> {
        let mut meta = self.meta("validate");
        let r = self.campaign(&mut meta)?;
        let set = self.validation_set(&mut meta)?;
        let report = mse_field(&self.model, &r, &set)?;
        meta["mse_norms"] = json!(report.norms);
        let mut w = ArtifactWriter::new(&self.out)?;
        export_mse(&mut w, &self.model, &r, &report)?;
        Ok((report, w.finish(meta)?))
    }

    /// First/total partial variances of the configured field.
    pub fn sense(&self) -> Result<(super::sensitivity::SensitivityReport, PathBuf)> {
        let mut meta = self.meta("sense");
        let r = self.campaign(&mut meta)?;
        let field = &self.config.sensitivity_field;
        let report = sensitivity_report(&r.field(field)?, field)?;
        let nv = self.model.scenario.mesh().n_vertices();
        let mut w = ArtifactWriter::new(&self.out)?;
        w.write(&format!("sensitivity_{field}.csv"), &report.to_csv())?;
        let mut cols: Vec<(String, Vec<f64>)> = vec![("variance".into(), report.variance[..nv].to_vec())];
        for (i, (f, t)) in report.first.iter().zip(&report.total).enumerate() {
            cols.push((format!("first_{}", i + 1), f[..nv].to_vec()));
            cols.push((format!("total_{}", i + 1), t[..nv].to_vec()));
        }
        cols.push(("first_sum".into(), report.first_sum()[..nv].to_vec()));
        let fields: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
        let title = format!("{} partial variances of {field}", self.model.scenario.name);
        w.write(
            &format!("sensitivity_{field}.vtk"),
            &crate::fem::output::vtk_string(self.model.scenario.mesh(), &title, &fields, None)?,
        )?;
        meta["sensitivity_field"] = json!(field);
        Ok((report, w.finish(meta)?))
    }

    /// MSE norms over the configured levels.
    pub fn convergence(&self) -> Result<(ConvergenceSweep, PathBuf)> {
        let mut meta = self.meta("convergence");
        let set = self.validation_set(&mut meta)?;
        let sweep = convergence_sweep(&self.model, &self.config.convergence_levels, &set, self.config.parallelism)?;
        meta["levels"] = json!(self.config.convergence_levels);
        meta["rows"] = json!(sweep
            .rows
            .iter()
            .map(|r| json!({"level": r.level, "n_nodes": r.n_nodes, "norms": r.norms}))
            .collect::<Vec<_>>());
        let mut w = ArtifactWriter::new(&self.out)?;
        w.write("convergence.csv", &sweep.to_csv())?;
        Ok((sweep, w.finish(meta)?))
    }
}
