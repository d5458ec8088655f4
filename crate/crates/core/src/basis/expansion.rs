use std::fmt::Write as _;
use std::ops::Range;

use crate::basis::index::{MultiIndex, TruncationSet};
use crate::basis::legendre::legendre_table;
use crate::error::{Error, Result};

/// Which Sobol partial variance to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SobolKind {
    First,
    Total,
}

/// Polynomial chaos expansion over the orthonormal Legendre basis.
///
/// Every mode carries a coefficient vector of the same `width`: width 1 for a
/// scalar quantity, the DOF count for a field. Coefficients are stored
/// mode-major, so mode `m` occupies `coeffs[m * width..(m + 1) * width]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosExpansion {
    basis: TruncationSet,
    width: usize,
    coeffs: Vec<f64>,
}

impl ChaosExpansion {
    /// Zero expansion on `basis`. The zero multi-index must be a member.
    pub fn zeros(basis: TruncationSet, width: usize) -> Result<Self> {
        if !basis.contains(&MultiIndex::zero(basis.dim())) {
            return Err(Error::InvalidInput("basis lacks the zero multi-index".into()));
        }
        let n = basis.len() * width;
        Ok(ChaosExpansion {
            basis,
            width,
            coeffs: vec![0.0; n],
        })
    }

    pub fn from_coefficients(basis: TruncationSet, width: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() * width {
            return Err(Error::DimensionMismatch {
                expected: basis.len() * width,
                got: coeffs.len(),
            });
        }
        let mut e = Self::zeros(basis, width)?;
        e.coeffs = coeffs;
        Ok(e)
    }

    /// Builds a scalar expansion from `(index, coefficient)` pairs; the basis is the
    /// downward closure of the given indices.
    pub fn from_scalar_modes(dim: usize, modes: &[(MultiIndex, f64)]) -> Result<Self> {
        let mut members = vec![MultiIndex::zero(dim)];
        for (k, _) in modes {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            // downward closure of the box below k
            let mut cur = vec![0usize; dim];
            loop {
                members.push(MultiIndex::new(cur.clone()));
                let mut axis = 0;
                while axis < dim {
                    cur[axis] += 1;
                    if cur[axis] <= k.degrees()[axis] {
                        break;
                    }
                    cur[axis] = 0;
                    axis += 1;
                }
                if axis == dim {
                    break;
                }
            }
        }
        let basis = TruncationSet::from_members(
            dim,
            crate::basis::index::TruncationRule::PartialDegree(members.iter().map(|m| m.partial_degree()).max().unwrap_or(0)),
            members,
        )?;
        let mut e = Self::zeros(basis, 1)?;
        for (k, c) in modes {
            let m = e.basis.position(k).expect("member of closure");
            e.coeffs[m] += *c;
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &TruncationSet {
        &self.basis
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn mode(&self, m: usize) -> &[f64] {
        &self.coeffs[m * self.width..(m + 1) * self.width]
    }

    pub fn mode_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.coeffs[m * self.width..(m + 1) * self.width]
    }

    /// Coefficient vector of `k`, or `None` when `k` is outside the basis.
    pub fn coefficient(&self, k: &MultiIndex) -> Option<&[f64]> {
        self.basis.position(k).map(|m| self.mode(m))
    }

    /// Restricts every mode to the payload components in `range`.
    pub fn slice(&self, range: Range<usize>) -> ChaosExpansion {
        let w = range.len();
        let mut coeffs = Vec::with_capacity(self.n_modes() * w);
        for m in 0..self.n_modes() {
            coeffs.extend_from_slice(&self.mode(m)[range.clone()]);
        }
        ChaosExpansion {
            basis: self.basis.clone(),
            width: w,
            coeffs,
        }
    }

    /// `a * self + b`, where `b` shifts the mean only.
    pub fn affine(&self, a: f64, b: f64) -> ChaosExpansion {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= a;
        }
        let zero = out.zero_position();
        for c in out.mode_mut(zero) {
            *c += b;
        }
        out
    }

    fn zero_position(&self) -> usize {
        self.basis
            .position(&MultiIndex::zero(self.dim()))
            .expect("zero index is always present")
    }

    /// Mean: the zero-index mode.
    pub fn mean(&self) -> Vec<f64> {
        self.mode(self.zero_position()).to_vec()
    }

    /// Componentwise variance `sum_{k != 0} X_k^2`.
    pub fn variance(&self) -> Vec<f64> {
        self.sum_sq_over(|k| !k.is_zero())
    }

    /// Componentwise covariance `sum_{k != 0} X_k Y_k`.
    pub fn covariance(&self, other: &ChaosExpansion) -> Result<Vec<f64>> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch("covariance needs identical truncation sets".into()));
        }
        if self.width != other.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        let mut out = vec![0.0; self.width];
        for (m, k) in self.basis.members().iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            for ((o, a), b) in out.iter_mut().zip(self.mode(m)).zip(other.mode(m)) {
                *o += a * b;
            }
        }
        Ok(out)
    }

    /// First- or total-order partial variance for the (zero-based) dimension `i`.
    pub fn sobol_partial_variance(&self, i: usize, kind: SobolKind) -> Result<Vec<f64>> {
        if i >= self.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension index {i} out of range for N = {}",
                self.dim()
            )));
        }
        Ok(match kind {
            SobolKind::First => self.sum_sq_over(|k| k.degrees().iter().enumerate().all(|(j, &d)| if j == i { d > 0 } else { d == 0 })),
            SobolKind::Total => self.sum_sq_over(|k| k.degrees()[i] > 0),
        })
    }

    fn sum_sq_over(&self, select: impl Fn(&MultiIndex) -> bool) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        for (m, k) in self.basis.members().iter().enumerate() {
            if !select(k) {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.mode(m)) {
                *o += c * c;
            }
        }
        out
    }

    /// Evaluates the surrogate at `xi`.
    pub fn evaluate(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.width];
        self.evaluate_into(xi, &mut out)?;
        Ok(out)
    }

    pub fn evaluate_into(&self, xi: &[f64], out: &mut [f64]) -> Result<()> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        let deg = self.basis.max_degree() + 1;
        let mut table = vec![0.0; self.dim() * deg];
        for (d, &x) in xi.iter().enumerate() {
            legendre_table(x, &mut table[d * deg..(d + 1) * deg]);
        }
        out.fill(0.0);
        for (m, k) in self.basis.members().iter().enumerate() {
            let phi: f64 = k.degrees().iter().enumerate().map(|(d, &kd)| table[d * deg + kd]).product();
            for (o, c) in out.iter_mut().zip(self.mode(m)) {
                *o += phi * c;
            }
        }
        Ok(())
    }

    /// Mode table as CSV: one row per multi-index, degrees then coefficients.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let header: Vec<String> = (1..=self.dim())
            .map(|i| format!("k{i}"))
            .chain((0..self.width).map(|j| format!("c{j}")))
            .collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for (m, k) in self.basis.members().iter().enumerate() {
            let mut first = true;
            for d in k.degrees() {
                if !first {
                    s.push(',');
                }
                first = false;
                let _ = write!(s, "{d}");
            }
            for c in self.mode(m) {
                // shortest round-trip representation
                let _ = write!(s, ",{c:?}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse("mode table", "empty input"))?;
        let cols: Vec<&str> = header.split(',').collect();
        let dim = cols.iter().filter(|c| c.starts_with('k')).count();
        let width = cols.len() - dim;
        if dim == 0 {
            return Err(Error::parse("mode table", "no degree columns"));
        }
        let mut members = Vec::new();
        let mut rows = Vec::new();
        for (ln, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + width {
                return Err(Error::parse("mode table", format!("row {} has {} fields", ln + 2, fields.len())));
            }
            let degs = fields[..dim]
                .iter()
                .map(|f| f.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse("mode table", e.to_string()))?;
            let vals = fields[dim..]
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse("mode table", e.to_string()))?;
            members.push(MultiIndex::new(degs.clone()));
            rows.push((MultiIndex::new(degs), vals));
        }
        let max = members.iter().map(|m| m.partial_degree()).max().unwrap_or(0);
        let basis = TruncationSet::from_members(dim, crate::basis::index::TruncationRule::PartialDegree(max), members)?;
        let mut e = Self::zeros(basis, width)?;
        for (k, vals) in rows {
            let m = e.basis.position(&k).expect("row index in basis");
            e.mode_mut(m).copy_from_slice(&vals);
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn mean_and_variance_examples() {
        let c = ChaosExpansion::from_scalar_modes(4, &[(MultiIndex::zero(4), 3.5)]).unwrap();
        assert_eq!(c.mean(), vec![3.5]);
        assert_eq!(c.variance(), vec![0.0]);

        let e = ChaosExpansion::from_scalar_modes(4, &[(MultiIndex::zero(4), 2.0), (mi(&[1, 0, 0, 0]), 0.5)]).unwrap();
        assert_eq!(e.mean(), vec![2.0]);

        let e = ChaosExpansion::from_scalar_modes(2, &[(mi(&[1, 0]), 1.5), (mi(&[0, 1]), -2.0)]).unwrap();
        assert_eq!(e.mean(), vec![0.0]);
        assert_eq!(e.variance(), vec![1.5 * 1.5 + 4.0]);
    }

    #[test]
    fn covariance_examples() {
        let basis = TruncationSet::total_degree(2, 1);
        // members: (0,0), (0,1), (1,0)
        let e1 = ChaosExpansion::from_coefficients(basis.clone(), 1, vec![1.0, 0.0, 2.0]).unwrap();
        let e2 = ChaosExpansion::from_coefficients(basis.clone(), 1, vec![5.0, 0.0, -1.0]).unwrap();
        assert_eq!(e1.covariance(&e2).unwrap(), vec![-2.0]);
        assert_eq!(e1.covariance(&e1).unwrap(), e1.variance());

        let a = ChaosExpansion::from_coefficients(basis.clone(), 1, vec![0.0, 0.0, 3.0]).unwrap();
        let b = ChaosExpansion::from_coefficients(basis, 1, vec![0.0, 4.0, 0.0]).unwrap();
        assert_eq!(a.covariance(&b).unwrap(), vec![0.0]);

        let other = ChaosExpansion::zeros(TruncationSet::total_degree(2, 2), 1).unwrap();
        assert!(matches!(a.covariance(&other), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn sobol_examples() {
        let e = ChaosExpansion::from_scalar_modes(3, &[(mi(&[1, 0, 0]), 0.7), (mi(&[3, 0, 0]), -0.2), (mi(&[0, 0, 0]), 4.0)]).unwrap();
        let var = e.variance()[0];
        assert!((e.sobol_partial_variance(0, SobolKind::First).unwrap()[0] - var).abs() < 1e-15);
        assert!((e.sobol_partial_variance(0, SobolKind::Total).unwrap()[0] - var).abs() < 1e-15);

        let c = 1.3;
        let e = ChaosExpansion::from_scalar_modes(2, &[(mi(&[1, 1]), c)]).unwrap();
        assert_eq!(e.sobol_partial_variance(0, SobolKind::First).unwrap(), vec![0.0]);
        assert!((e.sobol_partial_variance(0, SobolKind::Total).unwrap()[0] - c * c).abs() < 1e-15);
        assert!(e.sobol_partial_variance(2, SobolKind::First).is_err());
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let basis = TruncationSet::total_degree(3, 2);
        let coeffs: Vec<f64> = (0..basis.len() * 2).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let e = ChaosExpansion::from_coefficients(basis, 2, coeffs).unwrap();
        let back = ChaosExpansion::from_csv(&e.to_csv()).unwrap();
        assert_eq!(back.coefficients(), e.coefficients());
        assert_eq!(back.basis().members(), e.basis().members());
    }

    #[test]
    fn slice_keeps_modes() {
        let basis = TruncationSet::total_degree(2, 1);
        let e = ChaosExpansion::from_coefficients(basis, 3, (0..9).map(f64::from).collect()).unwrap();
        let s = e.slice(1..3);
        assert_eq!(s.coefficients(), &[1.0, 2.0, 4.0, 5.0, 7.0, 8.0]);
    }

    fn random_expansion(dim: usize, p: usize) -> impl Strategy<Value = ChaosExpansion> {
        let basis = TruncationSet::total_degree(dim, p);
        let n = basis.len();
        proptest::collection::vec(-2.0f64..2.0, n).prop_map(move |c| ChaosExpansion::from_coefficients(basis.clone(), 1, c).unwrap())
    }

    proptest! {
        #[test]
        fn partial_variances_bracket_variance(e in random_expansion(4, 3)) {
            let var = e.variance()[0];
            let first: f64 = (0..4).map(|i| e.sobol_partial_variance(i, SobolKind::First).unwrap()[0]).sum();
            let total: f64 = (0..4).map(|i| e.sobol_partial_variance(i, SobolKind::Total).unwrap()[0]).sum();
            prop_assert!(first <= var * (1.0 + 1e-14));
            prop_assert!(var <= total * (1.0 + 1e-14));
            for i in 0..4 {
                let f = e.sobol_partial_variance(i, SobolKind::First).unwrap()[0];
                let t = e.sobol_partial_variance(i, SobolKind::Total).unwrap()[0];
                prop_assert!(f <= t && t <= var * (1.0 + 1e-14));
            }
        }

        #[test]
        fn shift_scale_moments(e in random_expansion(3, 2), a in -3.0f64..3.0, b in -5.0f64..5.0) {
            let s = e.affine(a, b);
            prop_assert!((s.mean()[0] - (a * e.mean()[0] + b)).abs() <= 1e-12 * (1.0 + s.mean()[0].abs()));
            prop_assert!((s.variance()[0] - a * a * e.variance()[0]).abs() <= 1e-12 * (1.0 + s.variance()[0]));
        }

        #[test]
        fn full_sobol_partition(e in random_expansion(3, 3)) {
            // group squared modes by their active-variable set
            let mut groups = [0.0f64; 8];
            for (m, k) in e.basis().members().iter().enumerate() {
                let mask = k.degrees().iter().enumerate().fold(0usize, |acc, (i, &d)| if d > 0 { acc | (1 << i) } else { acc });
                groups[mask] += e.mode(m)[0].powi(2);
            }
            let var = e.variance()[0];
            let sum: f64 = groups[1..].iter().sum();
            prop_assert!((sum - var).abs() <= 1e-12 * (1.0 + var));
        }
    }
}
