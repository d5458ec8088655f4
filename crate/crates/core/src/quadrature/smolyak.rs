use std::collections::HashMap;

use crate::basis::{legendre_table, MultiIndex, TruncationRule, TruncationSet};
use crate::error::{Error, Result};
use crate::quadrature::clenshaw_curtis::{cc_rule, degree_cap, Rule1D};

/// Tolerance of the discrete orthonormality test that defines the admissible set.
pub const ORTHONORMALITY_TOL: f64 = 1e-12;

/// Full tensor product of 1D rules, one constituent of a sparse grid.
#[derive(Clone, Debug)]
pub struct TensorRule {
    levels: Vec<usize>,
    coefficient: i64,
    points: Vec<f64>,
    weights: Vec<f64>,
    node_ids: Vec<usize>,
    degree_caps: Vec<usize>,
}

impl TensorRule {
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Signed Smolyak combination coefficient.
    pub fn coefficient(&self) -> i64 {
        self.coefficient
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        let n = self.dim();
        &self.points[q * n..(q + 1) * n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of each tensor node in the sparse grid's unified node list.
    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    /// Per-dimension maximum degree of the admissible sub-basis.
    pub fn degree_caps(&self) -> &[usize] {
        &self.degree_caps
    }

    pub fn admits(&self, k: &MultiIndex) -> bool {
        k.degrees().iter().zip(&self.degree_caps).all(|(a, b)| a <= b)
    }

    /// Admissible sub-basis (the box below the degree caps), in canonical order.
    pub fn sub_basis(&self) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let n = self.dim();
        let mut cur = vec![0usize; n];
        loop {
            out.push(MultiIndex::new(cur.clone()));
            let mut axis = 0;
            while axis < n {
                cur[axis] += 1;
                if cur[axis] <= self.degree_caps[axis] {
                    break;
                }
                cur[axis] = 0;
                axis += 1;
            }
            if axis == n {
                break;
            }
        }
        out.sort();
        out
    }
}

/// `sum_q w_q phi_k(xi_q) phi_l(xi_q)` over the nodes of one tensor rule.
pub fn discrete_orthonormality(rule: &TensorRule, k: &MultiIndex, l: &MultiIndex) -> f64 {
    let n = rule.dim();
    let deg = k.partial_degree().max(l.partial_degree()) + 1;
    let mut table = vec![0.0; deg];
    (0..rule.len())
        .map(|q| {
            let x = rule.point(q);
            let mut prod = rule.weights[q];
            for d in 0..n {
                legendre_table(x[d], &mut table);
                prod *= table[k.degrees()[d]] * table[l.degrees()[d]];
            }
            prod
        })
        .sum()
}

/// Isotropic Smolyak sparse grid on nested Clenshaw-Curtis rules.
///
/// Constituent tensor rules have 1D levels `i` (counted from 0) with
/// `|i|_1 <= level`; only those with a non-zero combination coefficient are kept.
#[derive(Clone, Debug)]
pub struct SparseGrid {
    dim: usize,
    level: usize,
    rules_1d: Vec<Rule1D>,
    nodes: Vec<Vec<f64>>,
    tensors: Vec<TensorRule>,
    admissible: TruncationSet,
}

impl SparseGrid {
    pub fn new(dim: usize, level: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("sparse grid dimension must be at least 1".into()));
        }
        let rules_1d: Vec<Rule1D> = (0..=level).map(cc_rule).collect();
        let caps = constructive_degree_caps(&rules_1d)?;

        let index_set = level_vectors(dim, level);
        let mut tensors = Vec::new();
        let mut key_to_node: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut node_keys: Vec<Vec<u64>> = Vec::new();
        let mut node_intro: Vec<Vec<usize>> = Vec::new();
        let intro_level = |key: u64| -> usize {
            (0..=level)
                .find(|&l| rules_1d[l].keys().contains(&key))
                .expect("key from a constituent rule")
        };

        for levels in &index_set {
            let c = combination_coefficient(levels, level);
            if c == 0 {
                continue;
            }
            let sizes: Vec<usize> = levels.iter().map(|&l| rules_1d[l].len()).collect();
            let count: usize = sizes.iter().product();
            let mut points = Vec::with_capacity(count * dim);
            let mut weights = Vec::with_capacity(count);
            let mut node_ids = Vec::with_capacity(count);
            let mut idx = vec![0usize; dim];
            for _ in 0..count {
                let mut w = 1.0;
                let mut key = Vec::with_capacity(dim);
                for d in 0..dim {
                    let r = &rules_1d[levels[d]];
                    points.push(r.nodes()[idx[d]]);
                    w *= r.weights()[idx[d]];
                    key.push(r.keys()[idx[d]]);
                }
                weights.push(w);
                let id = match key_to_node.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = node_keys.len();
                        node_intro.push(key.iter().map(|&k| intro_level(k)).collect());
                        node_keys.push(key.clone());
                        key_to_node.insert(key, id);
                        id
                    }
                };
                node_ids.push(id);
                // last dimension varies fastest
                for d in (0..dim).rev() {
                    idx[d] += 1;
                    if idx[d] < sizes[d] {
                        break;
                    }
                    idx[d] = 0;
                }
            }
            tensors.push(TensorRule {
                levels: levels.clone(),
                coefficient: c,
                points,
                weights,
                node_ids,
                degree_caps: levels.iter().map(|&l| caps[l]).collect(),
            });
        }

        // canonical node order: by introduction levels (graded), then by key
        let mut order: Vec<usize> = (0..node_keys.len()).collect();
        order.sort_by(|&a, &b| {
            let sa: usize = node_intro[a].iter().sum();
            let sb: usize = node_intro[b].iter().sum();
            sa.cmp(&sb)
                .then_with(|| node_intro[a].cmp(&node_intro[b]))
                .then_with(|| node_keys[a].cmp(&node_keys[b]))
        });
        let mut remap = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        for t in &mut tensors {
            for id in &mut t.node_ids {
                *id = remap[*id];
            }
        }
        let nodes: Vec<Vec<f64>> = order
            .iter()
            .map(|&old| {
                node_keys[old]
                    .iter()
                    .map(|&k| crate::quadrature::clenshaw_curtis::node_from_key(k))
                    .collect()
            })
            .collect();

        let mut members = Vec::new();
        for t in &tensors {
            members.extend(t.sub_basis());
        }
        let admissible = TruncationSet::from_members(dim, TruncationRule::SparseGrid(level), members)?;

        Ok(SparseGrid {
            dim,
            level,
            rules_1d,
            nodes,
            tensors,
            admissible,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn tensors(&self) -> &[TensorRule] {
        &self.tensors
    }

    pub fn rule_1d(&self, level: usize) -> &Rule1D {
        &self.rules_1d[level]
    }

    /// Aliasing-free multi-index set `K(l)`.
    pub fn admissible_set(&self) -> &TruncationSet {
        &self.admissible
    }

    /// Smolyak weights collapsed onto the unified node list (classical sparse quadrature).
    pub fn global_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_nodes()];
        for t in &self.tensors {
            let c = t.coefficient as f64;
            for (&id, &wt) in t.node_ids.iter().zip(&t.weights) {
                w[id] += c * wt;
            }
        }
        w
    }

    /// Node table as CSV: `index,xi1,...,xiN`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index");
        for d in 1..=self.dim {
            s.push_str(&format!(",xi{d}"));
        }
        s.push('\n');
        for (q, x) in self.nodes.iter().enumerate() {
            s.push_str(&q.to_string());
            for v in x {
                s.push_str(&format!(",{v:?}"));
            }
            s.push('\n');
        }
        s
    }
}

/// All level vectors with `|i|_1 <= level`, in graded-lexicographic order.
fn level_vectors(dim: usize, level: usize) -> Vec<Vec<usize>> {
    TruncationSet::total_degree(dim, level)
        .members()
        .iter()
        .map(|m| m.degrees().to_vec())
        .collect()
}

/// `sum_{e in {0,1}^N, i+e admissible} (-1)^{|e|}` for the simplex `|i|_1 <= level`.
fn combination_coefficient(levels: &[usize], level: usize) -> i64 {
    let dim = levels.len();
    let base: usize = levels.iter().sum();
    let mut c = 0i64;
    for mask in 0u32..(1u32 << dim) {
        let ones = mask.count_ones() as usize;
        if base + ones <= level {
            c += if ones.is_multiple_of(2) { 1 } else { -1 };
        }
    }
    c
}

/// Largest degree per 1D level whose pairs pass the discrete orthonormality test.
fn constructive_degree_caps(rules: &[Rule1D]) -> Result<Vec<usize>> {
    let mut caps = Vec::with_capacity(rules.len());
    for r in rules {
        let max_try = r.len() + 1;
        let mut table = vec![0.0; max_try + 1];
        // gram[a][b] accumulated over nodes for a, b <= max_try
        let mut gram = vec![0.0; (max_try + 1) * (max_try + 1)];
        for (&x, &w) in r.nodes().iter().zip(r.weights()) {
            legendre_table(x, &mut table);
            for a in 0..=max_try {
                for b in 0..=max_try {
                    gram[a * (max_try + 1) + b] += w * table[a] * table[b];
                }
            }
        }
        let ok = |p: usize| {
            (0..=p).all(|a| {
                (0..=p).all(|b| {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    (gram[a * (max_try + 1) + b] - expected).abs() <= ORTHONORMALITY_TOL
                })
            })
        };
        let mut p = 0;
        while p < max_try && ok(p + 1) {
            p += 1;
        }
        if !ok(0) {
            return Err(Error::Internal(format!("level {} rule fails orthonormality", r.level())));
        }
        if p != degree_cap(r.level()) {
            return Err(Error::Internal(format!(
                "level {} admits degree {p}, expected {}",
                r.level(),
                degree_cap(r.level())
            )));
        }
        caps.push(p);
    }
    Ok(caps)
}
