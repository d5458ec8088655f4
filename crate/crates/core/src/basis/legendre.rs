//! Orthonormal Legendre polynomials on `[-1, 1]` under the uniform density 1/2.

/// Normalized Legendre polynomial `sqrt(2k+1) P_k(x)`.
///
/// Uses the three-term recurrence `(n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}`.
pub fn legendre_1d(k: usize, x: f64) -> f64 {
    (2.0 * k as f64 + 1.0).sqrt() * classical_legendre(k, x)
}

/// Classical (unit endpoint) Legendre polynomial `P_k(x)`.
pub fn classical_legendre(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for n in 1..k {
                let n = n as f64;
                let next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Fills `out[k] = legendre_1d(k, x)` for `k = 0..out.len()` in one recurrence sweep.
pub fn legendre_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut prev = 1.0;
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    let mut cur = x;
    out[1] = 3f64.sqrt() * x;
    for k in 1..out.len() - 1 {
        let n = k as f64;
        let next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        out[k + 1] = (2.0 * (n + 1.0) + 1.0).sqrt() * cur;
    }
}
