use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{BiotModel, OutputTimes};
use crate::coefficients::UncertaintyModel;
use crate::error::{Error, Result};
use crate::fem::ScenarioConfig;

/// A model preset name or an inline model table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Preset(String),
    Inline(UncertaintyModel),
}

impl ModelRef {
    pub fn resolve(&self) -> Result<UncertaintyModel> {
        match self {
            ModelRef::Preset(name) => UncertaintyModel::preset(name),
            ModelRef::Inline(m) => Ok(m.clone()),
        }
    }
}

fn default_samples() -> usize {
    500
}

fn default_scale() -> f64 {
    1.0
}

fn default_field() -> String {
    "u2".into()
}

fn default_levels() -> Vec<usize> {
    vec![1, 2, 3, 4, 5]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub model: ModelRef,
    pub scenario: ScenarioConfig,
    pub level: usize,
    /// N*, the Latin-hypercube validation sample count.
    #[serde(default = "default_samples")]
    pub validation_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Worker threads for node solves; 0 lets the pool decide.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default)]
    pub output_times: OutputTimes,
    /// Displacement magnification for the deformed-geometry VTK output.
    #[serde(default = "default_scale")]
    pub deformation_scale: f64,
    /// Output whose partial variances `sense` reports.
    #[serde(default = "default_field")]
    pub sensitivity_field: String,
    #[serde(default = "default_levels")]
    pub convergence_levels: Vec<usize>,
    /// Well tags for the two-problem superposition mode.
    #[serde(default)]
    pub superposition: Option<[String; 2]>,
    /// Korn-constant surrogate for the energy diagnostic.
    #[serde(default = "default_scale")]
    pub korn_constant: f64,
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: CampaignConfig = toml::from_str(text).map_err(|e| Error::parse("campaign config", e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    /// Reads a config; relative paths inside resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_toml(&text)?, base))
    }

    pub fn check(&self) -> Result<()> {
        if self.validation_samples == 0 {
            return Err(Error::InvalidInput("validation_samples must be at least 1".into()));
        }
        if self.convergence_levels.is_empty() {
            return Err(Error::InvalidInput("convergence_levels is empty".into()));
        }
        Ok(())
    }

    pub fn build_model(&self, base: &Path) -> Result<BiotModel> {
        let mut m = BiotModel::new(self.scenario.build(base)?, self.model.resolve()?)?;
        m.output = self.output_times;
        m.superposition = self.superposition.clone();
        Ok(m)
    }

    pub fn out_dir(&self, base: &Path) -> PathBuf {
        match &self.out {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => base.join(p),
            None => base.join("out"),
        }
    }
}
