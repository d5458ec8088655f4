//! Taylor-Hood triangle: quadratic displacement, linear pressure.
//!
//! Local P2 numbering: vertices 0, 1, 2, then the midpoints of the edges
//! opposite vertices 0, 1, 2. Local displacement DOF `2a + c` is component `c`
//! of node `a`.

use super::mesh::Point;

/// Degree-5 rule with 7 points: barycentric coordinates and area-normalized weights.
pub const TRI_QUAD: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506_2;
    const W2: f64 = 0.125_939_180_544_827_1;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], W0),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// 3-point Gauss rule on [0, 1]: (parameter, weight).
pub const EDGE_QUAD: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Affine triangle geometry.
#[derive(Clone, Copy, Debug)]
pub struct Geometry {
    pub vertices: [Point; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_l: [[f64; 2]; 3],
}

impl Geometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [a, b, c] = vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let grad_l = [
            [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
            [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
            [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
        ];
        Geometry {
            vertices,
            area: 0.5 * det,
            grad_l,
        }
    }

    pub fn point(&self, l: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }
}

/// Edge opposite local vertex `e`: its two endpoints.
pub const EDGE_ENDS: [[usize; 2]; 3] = [[1, 2], [2, 0], [0, 1]];

pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
        4.0 * l[0] * l[1],
    ]
}

pub fn p2_gradients(l: [f64; 3], g: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut out = [[0.0; 2]; 6];
    for i in 0..3 {
        let s = 4.0 * l[i] - 1.0;
        out[i] = [s * g[i][0], s * g[i][1]];
    }
    for (e, [a, b]) in EDGE_ENDS.iter().enumerate() {
        out[3 + e] = [
            4.0 * (l[*a] * g[*b][0] + l[*b] * g[*a][0]),
            4.0 * (l[*a] * g[*b][1] + l[*b] * g[*a][1]),
        ];
    }
    out
}

/// Local matrices of one triangle for unit coefficients.
pub struct LocalBlocks {
    /// ∫ 2 ε(v):ε(w), 12 × 12.
    pub a_mu: [[f64; 12]; 12],
    /// ∫ div v div w, 12 × 12.
    pub a_lambda: [[f64; 12]; 12],
    /// -∫ div v q, 3 × 12 (pressure rows).
    pub b: [[f64; 12]; 3],
    /// ∫ p q, 3 × 3.
    pub mass_p: [[f64; 3]; 3],
    /// ∫ ∇p·∇q, 3 × 3.
    pub lap_p: [[f64; 3]; 3],
    /// ∫ φ_a φ_b for scalar P2, 6 × 6.
    pub mass_u: [[f64; 6]; 6],
}

pub fn local_blocks(geo: &Geometry) -> LocalBlocks {
    let mut lb = LocalBlocks {
        a_mu: [[0.0; 12]; 12],
        a_lambda: [[0.0; 12]; 12],
        b: [[0.0; 12]; 3],
        mass_p: [[0.0; 3]; 3],
        lap_p: [[0.0; 3]; 3],
        mass_u: [[0.0; 6]; 6],
    };
    for (l, w) in TRI_QUAD {
        let wa = w * geo.area;
        let g = p2_gradients(l, &geo.grad_l);
        let phi = p2_values(l);
        for a in 0..6 {
            for c in 0..2 {
                let i = 2 * a + c;
                for b in 0..6 {
                    for d in 0..2 {
                        let j = 2 * b + d;
                        let dot = if c == d { g[a][0] * g[b][0] + g[a][1] * g[b][1] } else { 0.0 };
                        lb.a_mu[i][j] += wa * (dot + g[a][d] * g[b][c]);
                        lb.a_lambda[i][j] += wa * g[a][c] * g[b][d];
                    }
                }
                for q in 0..3 {
                    lb.b[q][i] -= wa * g[a][c] * l[q];
                }
            }
            for b in 0..6 {
                lb.mass_u[a][b] += wa * phi[a] * phi[b];
            }
        }
        for p in 0..3 {
            for q in 0..3 {
                lb.mass_p[p][q] += wa * l[p] * l[q];
            }
        }
    }
    for p in 0..3 {
        for q in 0..3 {
            let gp = geo.grad_l[p];
            let gq = geo.grad_l[q];
            lb.lap_p[p][q] = geo.area * (gp[0] * gq[0] + gp[1] * gq[1]);
        }
    }
    lb
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    // Polynomial in barycentric coordinates: exponent triple -> coefficient.
    type Poly = Vec<([usize; 3], f64)>;

    fn mul(p: &Poly, q: &Poly) -> Poly {
        let mut out = Vec::new();
        for (a, x) in p {
            for (b, y) in q {
                out.push(([a[0] + b[0], a[1] + b[1], a[2] + b[2]], x * y));
            }
        }
        out
    }

    // Exact: ∫_T λ0^a λ1^b λ2^c = 2|T| a! b! c! / (a+b+c+2)!
    fn integrate(p: &Poly, area: f64) -> f64 {
        p.iter()
            .map(|(e, c)| c * 2.0 * area * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + 2))
            .sum()
    }

    fn unit(i: usize) -> [usize; 3] {
        let mut e = [0; 3];
        e[i] = 1;
        e
    }

    // Component `d` of the gradient of P2 function `a`, as a polynomial.
    fn grad_poly(a: usize, d: usize, g: &[[f64; 2]; 3]) -> Poly {
        if a < 3 {
            vec![(unit(a), 4.0 * g[a][d]), ([0; 3], -g[a][d])]
        } else {
            let [i, j] = EDGE_ENDS[a - 3];
            vec![(unit(i), 4.0 * g[j][d]), (unit(j), 4.0 * g[i][d])]
        }
    }

    #[test]
    fn quadrature_weights_and_exactness() {
        let s: f64 = TRI_QUAD.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
        // degree 5 monomial λ0^3 λ1^2: exact value 2 * 3! 2! / 7! = 24/5040
        let q: f64 = TRI_QUAD.iter().map(|(l, w)| w * l[0].powi(3) * l[1].powi(2)).sum();
        assert!((0.5 * q - 0.5 * 24.0 / 5040.0).abs() < 1e-15);
    }

    #[test]
    fn reference_element_strain_matrix() {
        let geo = Geometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let lb = local_blocks(&geo);
        for a in 0..6 {
            for c in 0..2 {
                for b in 0..6 {
                    for d in 0..2 {
                        let mut p = if c == d {
                            let mut s = mul(&grad_poly(a, 0, &geo.grad_l), &grad_poly(b, 0, &geo.grad_l));
                            s.extend(mul(&grad_poly(a, 1, &geo.grad_l), &grad_poly(b, 1, &geo.grad_l)));
                            s
                        } else {
                            Vec::new()
                        };
                        p.extend(mul(&grad_poly(a, d, &geo.grad_l), &grad_poly(b, c, &geo.grad_l)));
                        let exact = integrate(&p, geo.area);
                        assert!((lb.a_mu[2 * a + c][2 * b + d] - exact).abs() < 1e-13, "{a} {c} {b} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn coupling_and_mass_match_exact_integration() {
        let geo = Geometry::new([[0.3, 0.1], [1.2, 0.4], [0.5, 1.3]]);
        let lb = local_blocks(&geo);
        for q in 0..3 {
            for a in 0..6 {
                for c in 0..2 {
                    let p = mul(&grad_poly(a, c, &geo.grad_l), &vec![(unit(q), 1.0)]);
                    assert!((lb.b[q][2 * a + c] + integrate(&p, geo.area)).abs() < 1e-13);
                }
            }
        }
        let m: f64 = lb.mass_u.iter().flatten().sum();
        assert!((m - geo.area).abs() < 1e-14);
        let mp: f64 = lb.mass_p.iter().flatten().sum();
        assert!((mp - geo.area).abs() < 1e-14);
    }

    #[test]
    fn rigid_motions_have_no_strain_energy() {
        let geo = Geometry::new([[0.3, 0.1], [1.2, 0.4], [0.5, 1.3]]);
        let lb = local_blocks(&geo);
        let nodes: Vec<Point> = (0..3)
            .map(|i| geo.vertices[i])
            .chain(EDGE_ENDS.iter().map(|[a, b]| {
                let (p, q) = (geo.vertices[*a], geo.vertices[*b]);
                [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
            }))
            .collect();
        let rotation: Vec<f64> = nodes.iter().flat_map(|x| [-x[1], x[0]]).collect();
        for i in 0..12 {
            let r: f64 = (0..12).map(|j| lb.a_mu[i][j] * rotation[j]).sum();
            assert!(r.abs() < 1e-13);
        }
    }
}
