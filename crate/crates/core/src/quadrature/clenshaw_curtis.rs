use std::f64::consts::PI;

/// Dyadic resolution of the canonical node keys. Supports 1D levels up to this value.
pub const MAX_LEVEL: usize = 40;

/// Nested Clenshaw-Curtis rule normalized to the uniform density 1/2 on `[-1, 1]`.
///
/// Node `j` of level `l >= 1` is `cos(pi j / 2^l)`; level 0 is the midpoint rule.
/// Every node carries an integer key `t * 2^MAX_LEVEL` for its angle fraction
/// `t = j / 2^l`, so nested nodes compare equal without tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    level: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    keys: Vec<u64>,
}

impl Rule1D {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Number of nodes of the level-`l` rule.
pub fn cc_size(level: usize) -> usize {
    if level == 0 {
        1
    } else {
        (1usize << level) + 1
    }
}

/// Largest 1D degree admitted at a level: products of two admissible
/// polynomials stay within the rule's exactness.
pub fn degree_cap(level: usize) -> usize {
    if level == 0 {
        0
    } else {
        1 << (level - 1)
    }
}

/// Node at angle key `key`, evaluated from the reduced dyadic fraction so that the
/// same key always yields the same bits.
pub fn node_from_key(key: u64) -> f64 {
    let full = 1u64 << MAX_LEVEL;
    let half = full >> 1;
    if key == half {
        return 0.0;
    }
    if key == 0 {
        return 1.0;
    }
    if key == full {
        return -1.0;
    }
    let (num, sign) = if key < half { (key, 1.0) } else { (full - key, -1.0) };
    let shift = num.trailing_zeros();
    let num = num >> shift;
    let den = full >> shift;
    sign * (PI * num as f64 / den as f64).cos()
}

pub fn cc_rule(level: usize) -> Rule1D {
    assert!(level <= MAX_LEVEL, "Clenshaw-Curtis level {level} exceeds {MAX_LEVEL}");
    if level == 0 {
        return Rule1D {
            level,
            nodes: vec![0.0],
            weights: vec![1.0],
            keys: vec![1u64 << (MAX_LEVEL - 1)],
        };
    }
    let m = 1usize << level;
    let keys: Vec<u64> = (0..=m as u64).map(|j| j << (MAX_LEVEL - level)).collect();
    let nodes: Vec<f64> = keys.iter().map(|&k| node_from_key(k)).collect();
    let mut weights = vec![0.0; m + 1];
    for j in 0..=m / 2 {
        let mut s = 0.0;
        for k in 1..=m / 2 {
            let b = if k == m / 2 { 1.0 } else { 2.0 };
            let kf = k as f64;
            s += b / (4.0 * kf * kf - 1.0) * (2.0 * PI * (k * j) as f64 / m as f64).cos();
        }
        let c = if j == 0 { 1.0 } else { 2.0 };
        // halved for the probability density
        let w = 0.5 * c / m as f64 * (1.0 - s);
        weights[j] = w;
        weights[m - j] = w;
    }
    Rule1D {
        level,
        nodes,
        weights,
        keys,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::legendre_1d;
    use approx::assert_abs_diff_eq;

    // Independent oracle: weights from the moment system sum_j w_j psi_i(x_j) = delta_i0.
    fn moment_weights(nodes: &[f64]) -> Vec<f64> {
        let n = nodes.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, &x) in nodes.iter().enumerate() {
                row[j] = legendre_1d(i, x);
            }
            row[n] = if i == 0 { 1.0 } else { 0.0 };
        }
        // Gaussian elimination with partial pivoting
        for c in 0..n {
            let p = (c..n).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
            a.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..=n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn level_zero_and_one() {
        let r0 = cc_rule(0);
        assert_eq!(r0.nodes(), &[0.0]);
        assert_eq!(r0.weights(), &[1.0]);
        let r1 = cc_rule(1);
        assert_eq!(r1.nodes(), &[1.0, 0.0, -1.0]);
        assert_abs_diff_eq!(r1.weights()[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.weights()[1], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r1.weights()[2], 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn level_two_integrates_quartic() {
        let r = cc_rule(2);
        assert_eq!(r.len(), 5);
        assert_abs_diff_eq!(r.integrate(|x| x.powi(4)), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn weights_match_moment_oracle() {
        for l in 1..=4 {
            let r = cc_rule(l);
            let w = moment_weights(r.nodes());
            for (a, b) in r.weights().iter().zip(&w) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn nested_bitwise_and_symmetric() {
        for l in 0..8 {
            let coarse = cc_rule(l);
            let fine = cc_rule(l + 1);
            for (k, x) in coarse.keys().iter().zip(coarse.nodes()) {
                let pos = fine.keys().iter().position(|f| f == k).expect("nested");
                assert_eq!(fine.nodes()[pos].to_bits(), x.to_bits());
            }
            let n = fine.len();
            for j in 0..n {
                assert_eq!(fine.nodes()[j], -fine.nodes()[n - 1 - j]);
                assert_eq!(fine.weights()[j], fine.weights()[n - 1 - j]);
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        for l in 0..=6 {
            let r = cc_rule(l);
            for j in 0..r.len() {
                let v = r.integrate(|x| legendre_1d(j, x));
                let expected = if j == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(r.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
    }
}
