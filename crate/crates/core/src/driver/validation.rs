//! Surrogate error against the exact model on Latin-hypercube points.

use rayon::prelude::*;
use serde::Serialize;

use super::campaign::{run_campaign_cached, with_pool, EvaluationCache};
use super::model::SampleModel;
use crate::error::{Error, Result};
use crate::quadrature::lhs_samples;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Excluded {
    pub index: usize,
    pub xi: Vec<f64>,
    pub reason: String,
}

/// Exact final-time payloads at the validation points; failed solves are
/// kept out and listed.
#[derive(Clone, Debug)]
pub struct ValidationSet {
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
    exact: Vec<Option<Vec<f64>>>,
    pub excluded: Vec<Excluded>,
}

impl ValidationSet {
    pub fn draw(model: &dyn SampleModel, count: usize, seed: u64, width: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("validation needs at least one sample".into()));
        }
        let points = lhs_samples(model.dim(), count, seed);
        let block = model.layout().width();
        let results: Vec<Result<Vec<f64>>> = with_pool(width, || points.par_iter().map(|xi| model.evaluate(xi)).collect())?;
        let mut excluded = Vec::new();
        let exact = results
            .into_iter()
            .enumerate()
            .map(|(index, r)| match r {
                Ok(payload) => Some(payload[payload.len() - block..].to_vec()),
                Err(e) => {
                    excluded.push(Excluded {
                        index,
                        xi: points[index].clone(),
                        reason: e.to_string(),
                    });
                    None
                }
            })
            .collect();
        Ok(ValidationSet {
            seed,
            points,
            exact,
            excluded,
        })
    }

    pub fn n_used(&self) -> usize {
        self.exact.iter().filter(|e| e.is_some()).count()
    }

    /// `(ξ, exact final-time block)` for the points that solved.
    pub fn used(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.points
            .iter()
            .zip(&self.exact)
            .filter_map(|(p, e)| e.as_ref().map(|e| (p.as_slice(), e.as_slice())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MseReport {
    pub level: usize,
    pub n_nodes: usize,
    pub n_used: usize,
    pub n_excluded: usize,
    /// Per-entry mean squared error of the final-time block.
    pub mse: Vec<f64>,
    /// Norms of the MSE field, per output (L²(D) for the solver).
    pub norms: Vec<(String, f64)>,
}

/// (1/N*) Σ (X(ξ) - X_K(ξ))² per entry, using the final-time block of `surrogate`.
pub fn mse_field(model: &dyn SampleModel, result: &super::campaign::CampaignResult, set: &ValidationSet) -> Result<MseReport> {
    let n = set.n_used();
    if n == 0 {
        return Err(Error::InvalidInput(format!("all {} validation solves failed", set.points.len())));
    }
    let surrogate = result.final_block();
    let mut mse = vec![0.0; surrogate.width()];
    let mut approx = vec![0.0; surrogate.width()];
    for (xi, exact) in set.used() {
        surrogate.evaluate_into(xi, &mut approx)?;
        for ((m, a), e) in mse.iter_mut().zip(&approx).zip(exact) {
            *m += (e - a) * (e - a);
        }
    }
    for m in &mut mse {
        *m /= n as f64;
    }
    Ok(MseReport {
        level: result.level,
        n_nodes: result.n_nodes,
        n_used: n,
        n_excluded: set.excluded.len(),
        norms: model.norms(&mse),
        mse,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSweep {
    pub rows: Vec<MseReport>,
}

impl ConvergenceSweep {
    pub fn to_csv(&self) -> String {
        let names: Vec<&str> = self
            .rows
            .first()
            .map(|r| r.norms.iter().map(|(n, _)| n.as_str()).collect())
            .unwrap_or_default();
        let mut s = String::from("level,n_nodes,n_used");
        for n in &names {
            s.push_str(&format!(",mse_norm_{n}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{},{},{}", r.level, r.n_nodes, r.n_used));
            for (_, v) in &r.norms {
                s.push_str(&format!(",{v:e}"));
            }
            s.push('\n');
        }
        s
    }

    /// Least-squares slope of log₁₀(norm) against level for output `k`.
    pub fn log_slope(&self, k: usize) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.level as f64, r.norms[k].1.log10())).collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }
}

/// MSE norms over `levels`, reusing node solves across the nested grids and
/// one set of exact validation solves.
pub fn convergence_sweep(model: &dyn SampleModel, levels: &[usize], set: &ValidationSet, width: usize) -> Result<ConvergenceSweep> {
    let mut cache = EvaluationCache::default();
    let rows = levels
        .iter()
        .map(|&l| {
            let r = run_campaign_cached(model, l, width, &mut cache)?;
            mse_field(model, &r, set)
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceSweep { rows })
}
