use std::cmp::Ordering;
use std::fmt;

use crate::basis::legendre::legendre_1d;
use crate::error::{Error, Result};

/// Polynomial degree per canonical variable.
///
/// Ordered graded-lexicographically: total degree first, then the degree tuple.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(degrees: Vec<usize>) -> Self {
        MultiIndex(degrees)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The index with degree `degree` in dimension `axis` and zero elsewhere.
    pub fn unit(dim: usize, axis: usize, degree: usize) -> Self {
        let mut d = vec![0; dim];
        d[axis] = degree;
        MultiIndex(d)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn partial_degree(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Evaluates the multivariate orthonormal Legendre polynomial at `xi`.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        Ok(self.0.iter().zip(xi).map(|(&k, &x)| legendre_1d(k, x)).product())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

/// Evaluates `prod_i psi_{k_i}(xi_i)`.
pub fn eval_basis(k: &MultiIndex, xi: &[f64]) -> Result<f64> {
    k.eval(xi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TruncationRule {
    TotalDegree(usize),
    PartialDegree(usize),
    /// Admissible set of a sparse grid of the given level.
    SparseGrid(usize),
}

/// Downward-closed set of multi-indices in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationSet {
    dim: usize,
    rule: TruncationRule,
    members: Vec<MultiIndex>,
}

impl TruncationSet {
    /// Builds a set from explicit members; sorts and deduplicates them and
    /// rejects sets that are not downward closed.
    pub fn from_members(dim: usize, rule: TruncationRule, mut members: Vec<MultiIndex>) -> Result<Self> {
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        members.sort();
        members.dedup();
        let set = TruncationSet { dim, rule, members };
        if !set.is_downward_closed() {
            return Err(Error::InvalidInput("truncation set is not downward closed".into()));
        }
        Ok(set)
    }

    pub fn total_degree(dim: usize, p: usize) -> Self {
        let mut members = Vec::new();
        enumerate_bounded(dim, &|k: &[usize]| k.iter().sum::<usize>() <= p, p, &mut members);
        members.sort();
        TruncationSet {
            dim,
            rule: TruncationRule::TotalDegree(p),
            members,
        }
    }

    pub fn partial_degree(dim: usize, p: usize) -> Self {
        let mut members = Vec::new();
        enumerate_bounded(dim, &|_: &[usize]| true, p, &mut members);
        members.sort();
        TruncationSet {
            dim,
            rule: TruncationRule::PartialDegree(p),
            members,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule(&self) -> &TruncationRule {
        &self.rule
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.members.binary_search(k).is_ok()
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.members.binary_search(k).ok()
    }

    pub fn max_degree(&self) -> usize {
        self.members.iter().map(|m| m.partial_degree()).max().unwrap_or(0)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.members.iter().all(|m| {
            (0..self.dim).all(|i| {
                if m.0[i] == 0 {
                    return true;
                }
                let mut lower = m.clone();
                lower.0[i] -= 1;
                self.contains(&lower)
            })
        })
    }

    pub fn is_subset_of(&self, other: &TruncationSet) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }
}

fn enumerate_bounded(dim: usize, keep: &dyn Fn(&[usize]) -> bool, max: usize, out: &mut Vec<MultiIndex>) {
    let mut cur = vec![0usize; dim];
    loop {
        if keep(&cur) {
            out.push(MultiIndex(cur.clone()));
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return;
            }
            cur[axis] += 1;
            // predicates are monotone, so a failure ends this axis
            if cur[axis] <= max && keep(&cur) {
                break;
            }
            cur[axis] = 0;
            axis += 1;
        }
    }
}
