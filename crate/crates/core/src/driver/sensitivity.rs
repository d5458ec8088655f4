use std::fmt::Write as _;

use serde::Serialize;

use crate::basis::{ChaosExpansion, SobolKind};
use crate::error::Result;

/// First- and total-order partial variances per entry and dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub field: String,
    pub variance: Vec<f64>,
    /// `first[i][j]`: dimension i, entry j.
    pub first: Vec<Vec<f64>>,
    pub total: Vec<Vec<f64>>,
}

impl SensitivityReport {
    /// Σᵢ Var_i per entry: the part of the variance without interactions.
    pub fn first_sum(&self) -> Vec<f64> {
        sum_rows(&self.first)
    }

    pub fn total_sum(&self) -> Vec<f64> {
        sum_rows(&self.total)
    }

    pub fn to_csv(&self) -> String {
        let n = self.first.len();
        let mut s = String::from("entry,variance");
        for i in 1..=n {
            let _ = write!(s, ",first_{i}");
        }
        for i in 1..=n {
            let _ = write!(s, ",total_{i}");
        }
        s.push_str(",first_sum,total_sum\n");
        let (fs, ts) = (self.first_sum(), self.total_sum());
        for j in 0..self.variance.len() {
            let _ = write!(s, "{j},{:e}", self.variance[j]);
            for row in self.first.iter().chain(&self.total) {
                let _ = write!(s, ",{:e}", row[j]);
            }
            let _ = writeln!(s, ",{:e},{:e}", fs[j], ts[j]);
        }
        s
    }
}

fn sum_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; rows.first().map_or(0, Vec::len)];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    out
}

pub fn sensitivity_report(expansion: &ChaosExpansion, field: &str) -> Result<SensitivityReport> {
    let dims = 0..expansion.dim();
    Ok(SensitivityReport {
        field: field.into(),
        variance: expansion.variance(),
        first: dims
            .clone()
            .map(|i| expansion.sobol_partial_variance(i, SobolKind::First))
            .collect::<Result<_>>()?,
        total: dims
            .map(|i| expansion.sobol_partial_variance(i, SobolKind::Total))
            .collect::<Result<_>>()?,
    })
}
