//! Campaign orchestration: grid nodes to samples, parallel deterministic
//! solves, projection, statistics, validation and export.

pub mod campaign;
pub mod config;
pub mod export;
pub mod model;
pub mod pipeline;
pub mod sensitivity;
pub mod superposition;
pub mod validation;

pub use campaign::{evaluate_points, quadrature_mean, run_campaign, run_campaign_cached, CampaignResult, EvaluationCache, Statistics};
pub use config::{CampaignConfig, ModelRef};
pub use export::{sha256_hex, ArtifactWriter};
pub use model::{stubs, BiotModel, FieldLayout, FieldSpan, FnModel, OutputTimes, SampleModel};
pub use pipeline::{Overrides, Session};
pub use sensitivity::{sensitivity_report, SensitivityReport};
pub use superposition::solve_superposed;
pub use validation::{convergence_sweep, mse_field, ConvergenceSweep, MseReport, ValidationSet};
