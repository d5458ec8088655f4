use rayon::prelude::*;

use crate::basis::{legendre_table, ChaosExpansion, TruncationSet};
use crate::error::{Error, Result};
use crate::quadrature::smolyak::{SparseGrid, TensorRule};

/// Payload columns handled per parallel task in the projection.
const CHUNK: usize = 512;

/// Model outputs at the sparse grid nodes, indexed by unified node number.
#[derive(Clone, Debug, Default)]
pub struct ModelEvaluations {
    payloads: Vec<Option<Vec<f64>>>,
}

impl ModelEvaluations {
    pub fn with_nodes(n_nodes: usize) -> Self {
        ModelEvaluations {
            payloads: vec![None; n_nodes],
        }
    }

    pub fn from_payloads(payloads: Vec<Vec<f64>>) -> Self {
        ModelEvaluations {
            payloads: payloads.into_iter().map(Some).collect(),
        }
    }

    pub fn insert(&mut self, node: usize, payload: Vec<f64>) {
        if node >= self.payloads.len() {
            self.payloads.resize(node + 1, None);
        }
        self.payloads[node] = Some(payload);
    }

    pub fn get(&self, node: usize) -> Option<&[f64]> {
        self.payloads.get(node).and_then(|p| p.as_deref())
    }

    /// Checks completeness against `n_nodes` and returns the common width.
    fn validate(&self, n_nodes: usize) -> Result<usize> {
        let mut width = None;
        for q in 0..n_nodes {
            let p = self.get(q).ok_or(Error::MissingPayload { index: q })?;
            match width {
                None => width = Some(p.len()),
                Some(w) if w != p.len() => return Err(Error::DimensionMismatch { expected: w, got: p.len() }),
                _ => {}
            }
        }
        width.ok_or_else(|| Error::InvalidInput("no grid nodes".into()))
    }
}

/// Weighted basis values `c_t w_q Π φ_k(x_q)` of one tensor rule, as
/// `(mode position, node id, value)` triples over its aliasing-free sub-basis.
fn tensor_entries(rule: &TensorRule, basis: &TruncationSet, out: &mut Vec<(usize, usize, f64)>) {
    let n = rule.dim();
    let nq = rule.len();
    let deg = rule.degree_caps().iter().copied().max().unwrap_or(0) + 1;
    let mut tables = vec![0.0; nq * n * deg];
    for q in 0..nq {
        let x = rule.point(q);
        for d in 0..n {
            let off = (q * n + d) * deg;
            legendre_table(x[d], &mut tables[off..off + deg]);
        }
    }
    let c = rule.coefficient() as f64;
    for k in rule.sub_basis() {
        let pos = basis.position(&k).expect("sub-basis inside K(l)");
        for q in 0..nq {
            let mut v = c * rule.weights()[q];
            for (d, &kd) in k.degrees().iter().enumerate() {
                v *= tables[(q * n + d) * deg + kd];
            }
            out.push((pos, rule.node_ids()[q], v));
        }
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        s = t;
    }
    s + c
}

/// The PSP as one linear map from node values to coefficients: row `m` lists
/// `(node, G[m][node])` by ascending node. Tensor contributions are merged here,
/// once, with compensated sums; otherwise the Smolyak cancellation between
/// rules would be repeated in rounding for every payload column.
fn global_operator(grid: &SparseGrid, basis: &TruncationSet) -> Vec<Vec<(usize, f64)>> {
    let mut entries = Vec::new();
    for t in grid.tensors() {
        tensor_entries(t, basis, &mut entries);
    }
    // stable: ties keep canonical tensor order
    entries.sort_by_key(|&(m, q, _)| (m, q));
    let mut rows = vec![Vec::new(); basis.len()];
    for run in entries.chunk_by(|a, b| a.0 == b.0 && a.1 == b.1) {
        let v = compensated_sum(run.iter().map(|e| e.2));
        if v != 0.0 {
            rows[run[0].0].push((run[0].1, v));
        }
    }
    rows
}

/// Sparse pseudo-spectral projection: the Smolyak combination of full-tensor
/// discrete projections, each restricted to its aliasing-free sub-basis.
///
/// The operator is assembled in a fixed order; parallelism only splits the
/// payload columns, so the result is bitwise independent of the thread count.
pub fn psp_project(grid: &SparseGrid, evals: &ModelEvaluations) -> Result<ChaosExpansion> {
    let width = evals.validate(grid.n_nodes())?;
    let basis = grid.admissible_set().clone();
    let rows = global_operator(grid, &basis);
    let n_modes = basis.len();

    let chunks: Vec<(usize, usize)> = (0..width).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(width))).collect();
    let blocks: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let w = hi - lo;
            let mut acc = vec![0.0; n_modes * w];
            for (m, row) in rows.iter().enumerate() {
                let out = &mut acc[m * w..(m + 1) * w];
                for &(id, g) in row {
                    let f = &evals.get(id).expect("validated")[lo..hi];
                    for (o, v) in out.iter_mut().zip(f) {
                        *o += g * v;
                    }
                }
            }
            acc
        })
        .collect();

    let mut coeffs = vec![0.0; n_modes * width];
    for ((lo, hi), block) in chunks.iter().zip(&blocks) {
        let w = hi - lo;
        for m in 0..n_modes {
            coeffs[m * width + lo..m * width + hi].copy_from_slice(&block[m * w..(m + 1) * w]);
        }
    }
    ChaosExpansion::from_coefficients(basis, width, coeffs)
}

/// Classical non-intrusive projection with the collapsed sparse quadrature onto
/// `basis`. Kept for comparison: it aliases on sets where the PSP does not.
pub fn nisp_project(grid: &SparseGrid, evals: &ModelEvaluations, basis: &TruncationSet) -> Result<ChaosExpansion> {
    let width = evals.validate(grid.n_nodes())?;
    let weights = grid.global_weights();
    let mut e = ChaosExpansion::zeros(basis.clone(), width)?;
    for (m, k) in basis.members().iter().enumerate() {
        for (q, x) in grid.nodes().iter().enumerate() {
            let phi = k.eval(x)? * weights[q];
            let f = evals.get(q).expect("validated");
            for (o, v) in e.mode_mut(m).iter_mut().zip(f) {
                *o += phi * v;
            }
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn evaluate(grid: &SparseGrid, f: impl Fn(&[f64]) -> Vec<f64>) -> ModelEvaluations {
        ModelEvaluations::from_payloads(grid.nodes().iter().map(|x| f(x)).collect())
    }

    #[test]
    fn constant_payload() {
        let g = SparseGrid::new(3, 3).unwrap();
        let e = psp_project(&g, &evaluate(&g, |_| vec![2.5, -1.0])).unwrap();
        assert!((e.mean()[0] - 2.5).abs() < 1e-13);
        assert!((e.mean()[1] + 1.0).abs() < 1e-13);
        for m in 1..e.n_modes() {
            assert!(e.mode(m).iter().all(|c| c.abs() <= 1e-13));
        }
    }

    #[test]
    fn bilinear_payload() {
        let g = SparseGrid::new(2, 2).unwrap();
        let e = psp_project(&g, &evaluate(&g, |x| vec![x[0] * x[1]])).unwrap();
        for (m, k) in e.basis().members().iter().enumerate() {
            let expected = if k.degrees() == [1, 1] { 1.0 / 3.0 } else { 0.0 };
            assert!((e.mode(m)[0] - expected).abs() <= 1e-12, "{k:?}");
        }
    }

    #[test]
    fn missing_payload_is_reported() {
        let g = SparseGrid::new(2, 1).unwrap();
        let mut ev = ModelEvaluations::with_nodes(g.n_nodes());
        for q in 0..g.n_nodes() {
            if q != 3 {
                ev.insert(q, vec![1.0]);
            }
        }
        assert!(matches!(psp_project(&g, &ev), Err(Error::MissingPayload { index: 3 })));
    }

    #[test]
    fn random_polynomials_in_admissible_span_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (dim, level) in [(2, 3), (3, 2), (4, 2)] {
            let g = SparseGrid::new(dim, level).unwrap();
            let basis = g.admissible_set();
            let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = |x: &[f64]| {
                vec![basis
                    .members()
                    .iter()
                    .zip(&coeffs)
                    .map(|(k, c)| c * k.eval(x).unwrap())
                    .sum::<f64>()]
            };
            let e = psp_project(&g, &evaluate(&g, f)).unwrap();
            for (m, c) in coeffs.iter().enumerate() {
                assert!((e.mode(m)[0] - c).abs() <= 1e-12, "dim {dim} level {level}");
            }
        }
    }

    #[test]
    fn nisp_aliases_where_psp_does_not() {
        let g = SparseGrid::new(2, 3).unwrap();
        let basis = g.admissible_set().clone();
        let mut worst_nisp: f64 = 0.0;
        for (pos, target) in basis.members().iter().enumerate() {
            let f = |x: &[f64]| vec![target.eval(x).unwrap()];
            let psp = psp_project(&g, &evaluate(&g, f)).unwrap();
            let nisp = nisp_project(&g, &evaluate(&g, f), &basis).unwrap();
            for m in 0..basis.len() {
                let exact = if m == pos { 1.0 } else { 0.0 };
                assert!((psp.mode(m)[0] - exact).abs() < 1e-12);
                worst_nisp = worst_nisp.max((nisp.mode(m)[0] - exact).abs());
            }
        }
        assert!(worst_nisp > 1e-3, "collapsed quadrature should alias, err {worst_nisp}");
    }

    #[test]
    fn chunked_projection_matches_single_column() {
        let g = SparseGrid::new(2, 3).unwrap();
        let wide = |x: &[f64]| (0..1200).map(|j| (x[0] + 0.001 * j as f64).exp() * x[1]).collect::<Vec<_>>();
        let e = psp_project(&g, &evaluate(&g, wide)).unwrap();
        let col = 777;
        let single = psp_project(&g, &evaluate(&g, |x| vec![wide(x)[col]])).unwrap();
        for m in 0..e.n_modes() {
            assert_eq!(e.mode(m)[col].to_bits(), single.mode(m)[0].to_bits());
        }
    }
}
