use super::element::{local_blocks, p2_values, Geometry, EDGE_QUAD, TRI_QUAD};
use super::mesh::{Point, TriMesh};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Global numbering: displacement components interleaved over P2 nodes
/// (vertices, then edge midpoints), then one pressure DOF per vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DofMap {
    pub n_vertices: usize,
    pub n_edges: usize,
}

impl DofMap {
    pub fn n_unodes(&self) -> usize {
        self.n_vertices + self.n_edges
    }

    pub fn n_u(&self) -> usize {
        2 * self.n_unodes()
    }

    pub fn n_p(&self) -> usize {
        self.n_vertices
    }

    pub fn n_dofs(&self) -> usize {
        self.n_u() + self.n_p()
    }

    pub fn u(&self, node: usize, comp: usize) -> usize {
        2 * node + comp
    }

    pub fn p(&self, vertex: usize) -> usize {
        self.n_u() + vertex
    }
}

/// Mesh with its unit-coefficient operator blocks, shared by all samples.
#[derive(Debug)]
pub struct Discretization {
    mesh: TriMesh,
    dofs: DofMap,
    /// ∫ 2ε(v):ε(w) on displacement DOFs.
    pub a_mu: CsrMatrix,
    /// ∫ div v div w.
    pub a_lambda: CsrMatrix,
    /// -∫ div v q; pressure rows, displacement columns.
    pub b: CsrMatrix,
    /// ∫ p q.
    pub mass_p: CsrMatrix,
    /// ∫ ∇p·∇q.
    pub lap_p: CsrMatrix,
    /// Scalar P2 mass ∫ φ_a φ_b on displacement nodes.
    pub mass_u: CsrMatrix,
}

impl Discretization {
    pub fn new(mesh: TriMesh) -> Self {
        let dofs = DofMap {
            n_vertices: mesh.n_vertices(),
            n_edges: mesh.n_edges(),
        };
        let nt = mesh.n_triangles();
        let mut a_mu = Vec::with_capacity(144 * nt);
        let mut a_lambda = Vec::with_capacity(144 * nt);
        let mut b = Vec::with_capacity(36 * nt);
        let mut mass_p = Vec::with_capacity(9 * nt);
        let mut lap_p = Vec::with_capacity(9 * nt);
        let mut mass_u = Vec::with_capacity(36 * nt);
        for t in 0..nt {
            let geo = geometry(&mesh, t);
            let lb = local_blocks(&geo);
            let nodes = p2_nodes(&mesh, t);
            let tri = mesh.triangles()[t];
            let ud = |i: usize| dofs.u(nodes[i / 2], i % 2);
            for i in 0..12 {
                for j in 0..12 {
                    a_mu.push((ud(i), ud(j), lb.a_mu[i][j]));
                    a_lambda.push((ud(i), ud(j), lb.a_lambda[i][j]));
                }
            }
            for q in 0..3 {
                for i in 0..12 {
                    b.push((tri[q], ud(i), lb.b[q][i]));
                }
                for r in 0..3 {
                    mass_p.push((tri[q], tri[r], lb.mass_p[q][r]));
                    lap_p.push((tri[q], tri[r], lb.lap_p[q][r]));
                }
            }
            for a in 0..6 {
                for c in 0..6 {
                    mass_u.push((nodes[a], nodes[c], lb.mass_u[a][c]));
                }
            }
        }
        let (nu, np) = (dofs.n_u(), dofs.n_p());
        Discretization {
            a_mu: CsrMatrix::from_triplets(nu, nu, &a_mu),
            a_lambda: CsrMatrix::from_triplets(nu, nu, &a_lambda),
            b: CsrMatrix::from_triplets(np, nu, &b),
            mass_p: CsrMatrix::from_triplets(np, np, &mass_p),
            lap_p: CsrMatrix::from_triplets(np, np, &lap_p),
            mass_u: CsrMatrix::from_triplets(dofs.n_unodes(), dofs.n_unodes(), &mass_u),
            mesh,
            dofs,
        }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn dofs(&self) -> DofMap {
        self.dofs
    }

    /// Coordinates of displacement node `n`.
    pub fn unode_point(&self, n: usize) -> Point {
        if n < self.dofs.n_vertices {
            self.mesh.vertices()[n]
        } else {
            self.mesh.edge_midpoint(n - self.dofs.n_vertices)
        }
    }

    /// Interpolates `u` and `p` into a full DOF vector.
    pub fn interpolate(&self, u: impl Fn(Point) -> [f64; 2], p: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut x = vec![0.0; self.dofs.n_dofs()];
        for n in 0..self.dofs.n_unodes() {
            let v = u(self.unode_point(n));
            x[self.dofs.u(n, 0)] = v[0];
            x[self.dofs.u(n, 1)] = v[1];
        }
        for (v, pt) in self.mesh.vertices().iter().enumerate() {
            x[self.dofs.p(v)] = p(*pt);
        }
        x
    }

    /// ∫ f·v for every displacement test function.
    pub fn body_force_load(&self, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dofs.n_u()];
        for t in 0..self.mesh.n_triangles() {
            let geo = geometry(&self.mesh, t);
            let nodes = p2_nodes(&self.mesh, t);
            for (l, w) in TRI_QUAD {
                let fx = f(geo.point(l));
                let phi = p2_values(l);
                for a in 0..6 {
                    let s = w * geo.area * phi[a];
                    out[self.dofs.u(nodes[a], 0)] += s * fx[0];
                    out[self.dofs.u(nodes[a], 1)] += s * fx[1];
                }
            }
        }
        out
    }

    /// ∫ g q for every pressure test function.
    pub fn source_load(&self, g: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dofs.n_p()];
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let geo = geometry(&self.mesh, t);
            for (l, w) in TRI_QUAD {
                let gx = g(geo.point(l));
                for q in 0..3 {
                    out[tri[q]] += w * geo.area * l[q] * gx;
                }
            }
        }
        out
    }

    /// `magnitude · q(x0)` for every pressure test function.
    pub fn point_source_load(&self, x0: Point, magnitude: f64) -> Result<Vec<f64>> {
        let (t, l) = self
            .mesh
            .locate(x0)
            .ok_or_else(|| Error::InvalidInput(format!("point source {x0:?} outside the mesh")))?;
        let mut out = vec![0.0; self.dofs.n_p()];
        for (q, v) in self.mesh.triangles()[t].iter().enumerate() {
            out[*v] += magnitude * l[q];
        }
        Ok(out)
    }

    /// ∫ τ·v over the edges tagged `tag`, exact for tractions of degree ≤ 3.
    pub fn traction_load(&self, tag: &str, traction: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dofs.n_u()];
        for (bi, e) in self.mesh.tagged(tag) {
            let [a, b] = self.mesh.boundary()[bi].vertices;
            let (pa, pb) = (self.mesh.vertices()[a], self.mesh.vertices()[b]);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            let mid = self.dofs.n_vertices + e;
            for (s, w) in EDGE_QUAD {
                let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                let tr = traction(x);
                let shape = [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)];
                for (node, phi) in [a, b, mid].into_iter().zip(shape) {
                    out[self.dofs.u(node, 0)] += w * len * phi * tr[0];
                    out[self.dofs.u(node, 1)] += w * len * phi * tr[1];
                }
            }
        }
        out
    }

    /// Evaluates a solution vector at a point: (u1, u2, p).
    pub fn evaluate(&self, x: &[f64], at: Point) -> Option<[f64; 3]> {
        let (t, l) = self.mesh.locate(at)?;
        let nodes = p2_nodes(&self.mesh, t);
        let phi = p2_values(l);
        let mut out = [0.0; 3];
        for a in 0..6 {
            out[0] += phi[a] * x[self.dofs.u(nodes[a], 0)];
            out[1] += phi[a] * x[self.dofs.u(nodes[a], 1)];
        }
        for (q, v) in self.mesh.triangles()[t].iter().enumerate() {
            out[2] += l[q] * x[self.dofs.p(*v)];
        }
        Some(out)
    }

    /// L² errors (‖u - u_h‖, ‖p - p_h‖) against exact fields, degree-5 quadrature.
    pub fn l2_errors(&self, x: &[f64], u: impl Fn(Point) -> [f64; 2], p: impl Fn(Point) -> f64) -> (f64, f64) {
        let (mut eu, mut ep) = (0.0, 0.0);
        for t in 0..self.mesh.n_triangles() {
            let geo = geometry(&self.mesh, t);
            let nodes = p2_nodes(&self.mesh, t);
            let tri = self.mesh.triangles()[t];
            for (l, w) in TRI_QUAD {
                let pt = geo.point(l);
                let phi = p2_values(l);
                let mut uh = [0.0; 2];
                for a in 0..6 {
                    uh[0] += phi[a] * x[self.dofs.u(nodes[a], 0)];
                    uh[1] += phi[a] * x[self.dofs.u(nodes[a], 1)];
                }
                let ph: f64 = (0..3).map(|q| l[q] * x[self.dofs.p(tri[q])]).sum();
                let ue = u(pt);
                eu += w * geo.area * ((ue[0] - uh[0]).powi(2) + (ue[1] - uh[1]).powi(2));
                ep += w * geo.area * (p(pt) - ph).powi(2);
            }
        }
        (eu.sqrt(), ep.sqrt())
    }

    /// L² norms (‖u_h‖, ‖p_h‖) of a DOF vector.
    pub fn l2_norms(&self, x: &[f64]) -> (f64, f64) {
        self.l2_errors(x, |_| [0.0; 2], |_| 0.0)
    }
}

pub fn geometry(mesh: &TriMesh, t: usize) -> Geometry {
    let tri = mesh.triangles()[t];
    let v = mesh.vertices();
    Geometry::new([v[tri[0]], v[tri[1]], v[tri[2]]])
}

/// Global P2 node ids of triangle `t` in local order.
pub fn p2_nodes(mesh: &TriMesh, t: usize) -> [usize; 6] {
    let tri = mesh.triangles()[t];
    let te = mesh.triangle_edges()[t];
    let nv = mesh.n_vertices();
    [tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disc(n: usize) -> Discretization {
        Discretization::new(TriMesh::unit_square(n).unwrap())
    }

    #[test]
    fn blocks_are_symmetric() {
        let d = disc(4);
        for m in [&d.a_mu, &d.a_lambda, &d.mass_p, &d.lap_p, &d.mass_u] {
            assert!(m.asymmetry() <= 1e-13 * m.max_abs());
        }
    }

    #[test]
    fn mass_totals_and_divergence() {
        let d = disc(3);
        let ones = vec![1.0; d.dofs().n_p()];
        assert!((d.mass_p.bilinear(&ones, &ones) - 1.0).abs() < 1e-14);
        let ones_u = vec![1.0; d.dofs().n_unodes()];
        assert!((d.mass_u.bilinear(&ones_u, &ones_u) - 1.0).abs() < 1e-14);
        // -∫ div u q with u = (x, 0), q = 1 is -1
        let x = d.interpolate(|p| [p[0], 0.0], |_| 0.0);
        let bu = d.b.mul_vec(&x[..d.dofs().n_u()]);
        assert!((bu.iter().sum::<f64>() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn elasticity_positive_on_clamped_space() {
        let d = disc(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let boundary: Vec<bool> = (0..d.dofs().n_unodes())
            .map(|n| {
                let p = d.unode_point(n);
                p[0] < 1e-12 || p[1] < 1e-12 || p[0] > 1.0 - 1e-12 || p[1] > 1.0 - 1e-12
            })
            .collect();
        for _ in 0..100 {
            let v: Vec<f64> = (0..d.dofs().n_u())
                .map(|i| if boundary[i / 2] { 0.0 } else { rng.random_range(-1.0..1.0) })
                .collect();
            assert!(d.a_mu.bilinear(&v, &v) > 0.0);
            assert!(d.a_lambda.bilinear(&v, &v) >= -1e-14);
            let q: Vec<f64> = (0..d.dofs().n_p()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(d.mass_p.bilinear(&q, &q) + 0.1 * d.lap_p.bilinear(&q, &q) >= 0.0);
        }
    }

    #[test]
    fn point_source_cardinal_properties() {
        let d = disc(4);
        let at_vertex = d.point_source_load([0.25, 0.25], 10.0).unwrap();
        let nz: Vec<f64> = at_vertex.iter().copied().filter(|v| v.abs() > 1e-14).collect();
        assert_eq!(nz.len(), 1);
        assert!((nz[0] - 10.0).abs() < 1e-12);
        let geo = geometry(d.mesh(), 5);
        let c = geo.point([1.0 / 3.0; 3]);
        let at_center = d.point_source_load(c, 3.0).unwrap();
        let nz: Vec<f64> = at_center.iter().copied().filter(|v| v.abs() > 1e-15).collect();
        assert_eq!(nz.len(), 3);
        assert!(nz.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let s: f64 = d.point_source_load([0.37, 0.81], 2.5).unwrap().iter().sum();
        assert!((s - 2.5).abs() < 1e-14);
        assert!(d.point_source_load([1.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn traction_simpson_ratio_and_resultant() {
        let d = disc(1);
        let load = d.traction_load("bottom", |_| [0.0, -6.0]);
        let nv = d.dofs().n_vertices;
        let vals: Vec<f64> = (0..d.dofs().n_unodes())
            .map(|n| load[d.dofs().u(n, 1)])
            .filter(|v| *v != 0.0)
            .collect();
        assert_eq!(vals.len(), 3);
        let mid = (0..d.dofs().n_edges).find(|&e| d.unode_point(nv + e) == [0.5, 0.0]).unwrap();
        assert!((load[d.dofs().u(nv + mid, 1)] + 4.0).abs() < 1e-14);
        assert!((load[d.dofs().u(0, 1)] + 1.0).abs() < 1e-14);
        assert!(d.traction_load("top", |_| [0.0, 0.0]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn body_force_resultant() {
        let d = disc(3);
        let f = d.body_force_load(|_| [2.0, -1.0]);
        let s0: f64 = (0..d.dofs().n_unodes()).map(|n| f[d.dofs().u(n, 0)]).sum();
        let s1: f64 = (0..d.dofs().n_unodes()).map(|n| f[d.dofs().u(n, 1)]).sum();
        assert!((s0 - 2.0).abs() < 1e-13 && (s1 + 1.0).abs() < 1e-13);
    }

    #[test]
    fn evaluate_reproduces_quadratics() {
        let d = disc(3);
        let x = d.interpolate(|p| [p[0] * p[1], p[1] * p[1]], |p| 1.0 + p[0] - p[1]);
        let v = d.evaluate(&x, [0.41, 0.73]).unwrap();
        assert!((v[0] - 0.41 * 0.73).abs() < 1e-14);
        assert!((v[1] - 0.73 * 0.73).abs() < 1e-14);
        assert!((v[2] - (1.0 + 0.41 - 0.73)).abs() < 1e-14);
        let (eu, ep) = d.l2_errors(&x, |p| [p[0] * p[1], p[1] * p[1]], |p| 1.0 + p[0] - p[1]);
        assert!(eu < 1e-14 && ep < 1e-14);
    }
}
