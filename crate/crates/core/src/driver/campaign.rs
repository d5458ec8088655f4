use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::model::{FieldLayout, SampleModel};
use crate::basis::ChaosExpansion;
use crate::error::{Error, Result};
use crate::quadrature::{psp_project, ModelEvaluations, SparseGrid};

/// Runs `f` on a pool of `width` threads (`0` = rayon default).
pub fn with_pool<T: Send>(width: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Evaluates `model` at every point, in parallel, returning results in input
/// order. The first failure (lowest index) aborts with its index and ξ.
pub fn evaluate_points(model: &dyn SampleModel, points: &[Vec<f64>], width: usize) -> Result<Vec<Vec<f64>>> {
    let results: Vec<Result<Vec<f64>>> = with_pool(width, || points.par_iter().map(|xi| model.evaluate(xi)).collect())?;
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::NodeSolve {
                index,
                xi: points[index].clone(),
                source: Box::new(e),
            })
        })
        .collect()
}

fn key(xi: &[f64]) -> Vec<u64> {
    xi.iter().map(|v| v.to_bits()).collect()
}

/// Exact-model evaluations keyed by the bit pattern of ξ; nested grids share
/// most nodes across levels.
#[derive(Default)]
pub struct EvaluationCache {
    map: HashMap<Vec<u64>, Vec<f64>>,
}

impl EvaluationCache {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Payloads for all grid nodes, solving only the missing ones.
    pub fn grid_evaluations(&mut self, model: &dyn SampleModel, grid: &SparseGrid, width: usize) -> Result<ModelEvaluations> {
        let missing: Vec<usize> = (0..grid.n_nodes())
            .filter(|&q| !self.map.contains_key(&key(&grid.nodes()[q])))
            .collect();
        let points: Vec<Vec<f64>> = missing.iter().map(|&q| grid.nodes()[q].clone()).collect();
        let fresh = evaluate_points(model, &points, width).map_err(|e| match e {
            Error::NodeSolve { index, xi, source } => Error::NodeSolve {
                index: missing[index],
                xi,
                source,
            },
            other => other,
        })?;
        for (xi, payload) in points.iter().zip(fresh) {
            self.map.insert(key(xi), payload);
        }
        Ok(ModelEvaluations::from_payloads(
            grid.nodes().iter().map(|xi| self.map[&key(xi)].clone()).collect(),
        ))
    }
}

/// Expansion of the full payload on one grid.
#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub level: usize,
    pub n_nodes: usize,
    pub layout: FieldLayout,
    pub times: Vec<f64>,
    pub expansion: ChaosExpansion,
}

/// Mean, variance and pairwise covariance fields of one output time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statistics {
    pub time: f64,
    pub mean: Vec<(String, Vec<f64>)>,
    pub variance: Vec<(String, Vec<f64>)>,
    /// Over the first `layout.shared` entries of each field.
    pub covariance: Vec<(String, String, Vec<f64>)>,
}

impl Statistics {
    pub fn get<'a>(list: &'a [(String, Vec<f64>)], name: &str) -> Option<&'a [f64]> {
        list.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

impl CampaignResult {
    pub fn block_width(&self) -> usize {
        self.layout.width()
    }

    /// Expansion of all fields at output time `k`.
    pub fn time_block(&self, k: usize) -> ChaosExpansion {
        let w = self.block_width();
        self.expansion.slice(k * w..(k + 1) * w)
    }

    pub fn final_block(&self) -> ChaosExpansion {
        self.time_block(self.times.len() - 1)
    }

    /// Expansion of one named field at the final time.
    pub fn field(&self, name: &str) -> Result<ChaosExpansion> {
        let f = self.layout.field(name)?;
        Ok(self.final_block().slice(f.offset..f.offset + f.len))
    }

    pub fn statistics(&self, k: usize) -> Result<Statistics> {
        let block = self.time_block(k);
        let fields: Vec<(String, ChaosExpansion)> = self
            .layout
            .fields
            .iter()
            .map(|f| (f.name.clone(), block.slice(f.offset..f.offset + f.len)))
            .collect();
        let mut covariance = Vec::new();
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                let a = fields[i].1.slice(0..self.layout.shared);
                let b = fields[j].1.slice(0..self.layout.shared);
                covariance.push((fields[i].0.clone(), fields[j].0.clone(), a.covariance(&b)?));
            }
        }
        Ok(Statistics {
            time: self.times[k],
            mean: fields.iter().map(|(n, e)| (n.clone(), e.mean())).collect(),
            variance: fields.iter().map(|(n, e)| (n.clone(), e.variance())).collect(),
            covariance,
        })
    }
}

/// Solves the model on every node of the level-`level` grid and projects.
pub fn run_campaign(model: &dyn SampleModel, level: usize, width: usize) -> Result<CampaignResult> {
    run_campaign_cached(model, level, width, &mut EvaluationCache::default())
}

pub fn run_campaign_cached(model: &dyn SampleModel, level: usize, width: usize, cache: &mut EvaluationCache) -> Result<CampaignResult> {
    let grid = SparseGrid::new(model.dim(), level)?;
    let evals = cache.grid_evaluations(model, &grid, width)?;
    let expansion = with_pool(width, || psp_project(&grid, &evals))??;
    Ok(CampaignResult {
        level,
        n_nodes: grid.n_nodes(),
        layout: model.layout(),
        times: model.times(),
        expansion,
    })
}

/// Σ_q w_q X(ξ_q) with the global Smolyak weights: the second route to the mean.
pub fn quadrature_mean(grid: &SparseGrid, evals: &ModelEvaluations) -> Result<Vec<f64>> {
    let weights = grid.global_weights();
    let mut mean: Vec<f64> = Vec::new();
    for (q, w) in weights.iter().enumerate() {
        let x = evals.get(q).ok_or(Error::MissingPayload { index: q })?;
        if mean.is_empty() {
            mean = vec![0.0; x.len()];
        }
        for (m, v) in mean.iter_mut().zip(x) {
            *m += w * v;
        }
    }
    Ok(mean)
}
