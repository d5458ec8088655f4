use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::assembly::Discretization;
use super::scenario::{Constraint, Scenario};
use super::sparse::CsrMatrix;
use crate::coefficients::PoroelasticSample;
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;

/// Coefficients entering the discrete operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiotCoefficients {
    pub mu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub c0: f64,
}

impl From<&PoroelasticSample> for BiotCoefficients {
    fn from(s: &PoroelasticSample) -> Self {
        BiotCoefficients {
            mu: s.mu,
            lambda: s.lambda,
            alpha: s.alpha,
            kappa: s.kappa,
            c0: s.c0,
        }
    }
}

impl BiotCoefficients {
    pub fn digest(&self) -> String {
        format!(
            "mu={:e} lambda={:e} alpha={:e} kappa={:e} c0={:e}",
            self.mu, self.lambda, self.alpha, self.kappa, self.c0
        )
    }
}

/// Full DOF vector (displacement then pressure) at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution {
    pub time: f64,
    pub values: Vec<f64>,
}

impl FieldSolution {
    pub fn displacement<'a>(&'a self, disc: &Discretization) -> &'a [f64] {
        &self.values[..disc.dofs().n_u()]
    }

    pub fn pressure<'a>(&'a self, disc: &Discretization) -> &'a [f64] {
        &self.values[disc.dofs().n_u()..]
    }

    /// Vertex values `(u1, u2, p)` in mesh vertex order.
    pub fn vertex_fields(&self, disc: &Discretization) -> [Vec<f64>; 3] {
        let d = disc.dofs();
        let nv = d.n_vertices;
        [
            (0..nv).map(|v| self.values[d.u(v, 0)]).collect(),
            (0..nv).map(|v| self.values[d.u(v, 1)]).collect(),
            (0..nv).map(|v| self.values[d.p(v)]).collect(),
        ]
    }
}

#[derive(Clone, Copy, Debug)]
enum DirichletSource {
    U { bc: usize, node: usize, comp: usize },
    P { bc: usize, vertex: usize },
}

/// Constrained DOFs and the free numbering.
struct Layout {
    /// Sorted Dirichlet DOFs with their data source.
    dirichlet: Vec<(usize, DirichletSource)>,
    /// Global DOF (or multiplier) → free index, `usize::MAX` if constrained.
    free_of: Vec<usize>,
    free: Vec<usize>,
    multipliers: Vec<Vec<(usize, f64)>>,
}

fn layout(s: &Scenario) -> Result<Layout> {
    let disc = s.discretization();
    let mesh = disc.mesh();
    let d = disc.dofs();
    let mut dir: BTreeMap<usize, DirichletSource> = BTreeMap::new();
    for (bi, bc) in s.displacement.iter().enumerate() {
        for (b, e) in mesh.tagged(&bc.tag) {
            let [va, vb] = mesh.boundary()[b].vertices;
            let (pa, pb) = (mesh.vertices()[va], mesh.vertices()[vb]);
            let (dx, dy) = ((pb[0] - pa[0]).abs(), (pb[1] - pa[1]).abs());
            let len = dx.hypot(dy);
            // component along the normal of an axis-aligned edge
            let normal = if dy <= 1e-12 * len {
                Some(1)
            } else if dx <= 1e-12 * len {
                Some(0)
            } else {
                None
            };
            let comps: Vec<usize> = match (bc.kind, normal) {
                (Constraint::Clamped, _) => vec![0, 1],
                (Constraint::FixNormal, Some(n)) => vec![n],
                (Constraint::FixTangential, Some(n)) => vec![1 - n],
                _ => return Err(Error::Mesh(format!("{:?} on tag '{}' needs axis-aligned edges", bc.kind, bc.tag))),
            };
            for node in [va, vb, d.n_vertices + e] {
                for &comp in &comps {
                    dir.insert(d.u(node, comp), DirichletSource::U { bc: bi, node, comp });
                }
            }
        }
    }
    for (bi, bc) in s.pressure.iter().enumerate() {
        for (b, _) in mesh.tagged(&bc.tag) {
            for vertex in mesh.boundary()[b].vertices {
                dir.insert(d.p(vertex), DirichletSource::P { bc: bi, vertex });
            }
        }
    }

    let mut multipliers = Vec::new();
    if s.rigid_motion {
        let t1 = disc.body_force_load(|_| [1.0, 0.0]);
        let t2 = disc.body_force_load(|_| [0.0, 1.0]);
        let rot = disc.body_force_load(|x| [-x[1], x[0]]);
        for v in [t1, t2, rot] {
            multipliers.push(v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (i, *x)).collect());
        }
    }
    if s.zero_mean_pressure {
        let m = disc.source_load(|_| 1.0);
        multipliers.push(
            m.iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .map(|(i, x)| (d.p(i), *x))
                .collect(),
        );
    }

    let n_total = d.n_dofs() + multipliers.len();
    let mut free_of = vec![usize::MAX; n_total];
    let mut free = Vec::with_capacity(n_total - dir.len());
    for (i, slot) in free_of.iter_mut().enumerate() {
        if !dir.contains_key(&i) {
            *slot = free.len();
            free.push(i);
        }
    }
    Ok(Layout {
        dirichlet: dir.into_iter().collect(),
        free_of,
        free,
        multipliers,
    })
}

/// Cached symbolic LU keyed by the sparsity pattern.
#[derive(Default)]
pub struct SymbolicCache {
    entry: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl std::fmt::Debug for SymbolicCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SymbolicCache({})", if self.entry.is_some() { "filled" } else { "empty" })
    }
}

/// Which system to factor.
#[derive(Clone, Copy, Debug, PartialEq)]
enum SystemKind {
    /// [A Bᵀ; B -(C + dt Dk)]
    Step { dt: f64 },
    /// [A Bᵀ; 0 -Dk]
    Steady,
}

/// A factored system with Dirichlet DOFs eliminated.
pub struct BiotSolver<'s> {
    scenario: &'s Scenario,
    coeffs: BiotCoefficients,
    layout: Layout,
    k_ff: CsrMatrix,
    k_fd: CsrMatrix,
    lu: Lu<usize, f64>,
    kind: SystemKind,
}

fn system_triplets(
    disc: &Discretization,
    c: &BiotCoefficients,
    kind: SystemKind,
    multipliers: &[Vec<(usize, f64)>],
) -> Vec<(usize, usize, f64)> {
    let d = disc.dofs();
    let nu = d.n_u();
    let mut t = Vec::with_capacity(disc.a_mu.nnz() * 2 + disc.b.nnz() * 2 + disc.mass_p.nnz() * 2);
    for (r, col, v) in disc.a_mu.iter() {
        t.push((r, col, c.mu * v));
    }
    for (r, col, v) in disc.a_lambda.iter() {
        t.push((r, col, c.lambda * v));
    }
    for (q, col, v) in disc.b.iter() {
        t.push((col, nu + q, c.alpha * v));
        let row = if kind == SystemKind::Steady { 0.0 } else { c.alpha * v };
        t.push((nu + q, col, row));
    }
    let (storage, darcy) = match kind {
        SystemKind::Step { dt } => (c.c0, dt * c.kappa),
        SystemKind::Steady => (0.0, c.kappa),
    };
    for (r, col, v) in disc.mass_p.iter() {
        t.push((nu + r, nu + col, -storage * v));
    }
    for (r, col, v) in disc.lap_p.iter() {
        t.push((nu + r, nu + col, -darcy * v));
    }
    let n = d.n_dofs();
    for (k, row) in multipliers.iter().enumerate() {
        for &(i, v) in row {
            t.push((n + k, i, v));
            t.push((i, n + k, v));
        }
    }
    t
}

impl<'s> BiotSolver<'s> {
    /// Assembles and factors the implicit Euler step matrix for `coeffs`.
    pub fn new(scenario: &'s Scenario, coeffs: BiotCoefficients) -> Result<Self> {
        BiotSolver::with_kind(scenario, coeffs, SystemKind::Step { dt: scenario.dt() })
    }

    /// Factors the steady system: Darcy flow decoupled from storage.
    pub fn steady(scenario: &'s Scenario, coeffs: BiotCoefficients) -> Result<Self> {
        BiotSolver::with_kind(scenario, coeffs, SystemKind::Steady)
    }

    fn with_kind(scenario: &'s Scenario, coeffs: BiotCoefficients, kind: SystemKind) -> Result<Self> {
        scenario.validate()?;
        let layout = layout(scenario)?;
        let disc = scenario.discretization();
        let triplets = system_triplets(disc, &coeffs, kind, &layout.multipliers);
        let nf = layout.free.len();
        let nd = layout.dirichlet.len();
        let mut d_index = vec![usize::MAX; layout.free_of.len()];
        for (k, (dof, _)) in layout.dirichlet.iter().enumerate() {
            d_index[*dof] = k;
        }
        let mut ff = Vec::with_capacity(triplets.len());
        let mut fd = Vec::new();
        for (r, c, v) in triplets {
            let fr = layout.free_of[r];
            if fr == usize::MAX {
                continue;
            }
            match layout.free_of[c] {
                usize::MAX => fd.push((fr, d_index[c], v)),
                fc => ff.push((fr, fc, v)),
            }
        }
        let k_ff = CsrMatrix::from_triplets(nf, nf, &ff);
        let k_fd = CsrMatrix::from_triplets(nf, nd, &fd);
        let lu = factor(scenario, &k_ff, &coeffs)?;
        Ok(BiotSolver {
            scenario,
            coeffs,
            layout,
            k_ff,
            k_fd,
            lu,
            kind,
        })
    }

    pub fn coefficients(&self) -> &BiotCoefficients {
        &self.coeffs
    }

    /// Number of unknowns after elimination (including multipliers).
    pub fn n_free(&self) -> usize {
        self.layout.free.len()
    }

    /// Dirichlet DOFs and their values at time `t`.
    pub fn dirichlet_values(&self, t: f64) -> Vec<(usize, f64)> {
        let s = self.scenario;
        let disc = s.discretization();
        self.layout
            .dirichlet
            .iter()
            .map(|&(dof, src)| {
                let v = match src {
                    DirichletSource::U { bc, node, comp } => s.displacement[bc].value.at(disc.unode_point(node), t)[comp],
                    DirichletSource::P { bc, vertex } => s.pressure[bc].value.at(disc.mesh().vertices()[vertex], t),
                };
                (dof, v)
            })
            .collect()
    }

    /// Momentum load F(t): body force, tractions.
    pub fn momentum_load(&self, t: f64) -> Vec<f64> {
        let s = self.scenario;
        let disc = s.discretization();
        let mut f = vec![0.0; disc.dofs().n_u()];
        if let Some(bf) = &s.body_force {
            add(&mut f, &disc.body_force_load(|x| bf.at(x, t)));
        }
        for tr in &s.traction {
            add(&mut f, &disc.traction_load(&tr.tag, |x| tr.value.at(x, t)));
        }
        f
    }

    /// Fluid load G(t): volume source and point sources.
    pub fn fluid_load(&self, t: f64) -> Result<Vec<f64>> {
        let s = self.scenario;
        let disc = s.discretization();
        let mut g = vec![0.0; disc.dofs().n_p()];
        if let Some(src) = &s.source {
            add(&mut g, &disc.source_load(|x| src.at(x, t)));
        }
        for ps in &s.point_sources {
            add(&mut g, &disc.point_source_load(ps.at, ps.magnitude)?);
        }
        Ok(g)
    }

    /// Fluid content functional m = C p - B u, i.e. ∫ (c0 p + α div u) q.
    pub fn fluid_content(&self, state: &FieldSolution) -> Vec<f64> {
        let disc = self.scenario.discretization();
        let c = &self.coeffs;
        let mut m = disc.mass_p.mul_vec(state.pressure(disc));
        let bu = disc.b.mul_vec(state.displacement(disc));
        for (mi, bi) in m.iter_mut().zip(bu) {
            *mi = c.c0 * *mi - c.alpha * bi;
        }
        m
    }

    /// Initial fluid content ∫ φ₀ q.
    pub fn initial_fluid_content(&self) -> Vec<f64> {
        let s = self.scenario;
        let disc = s.discretization();
        match &s.initial_fluid_content {
            Some(phi0) => disc.source_load(|x| phi0.at(x, 0.0)),
            None => vec![0.0; disc.dofs().n_p()],
        }
    }

    /// Solves the factored system for a full right-hand side at time `t`.
    fn solve_full(&self, rhs: &[f64], t: f64) -> Result<Vec<f64>> {
        let s = self.scenario;
        let n = s.discretization().dofs().n_dofs();
        let dvals = self.dirichlet_values(t);
        let xd: Vec<f64> = dvals.iter().map(|(_, v)| *v).collect();
        let kx = self.k_fd.mul_vec(&xd);
        let rf: Vec<f64> = self
            .layout
            .free
            .iter()
            .zip(&kx)
            .map(|(&g, k)| rhs.get(g).copied().unwrap_or(0.0) - k)
            .collect();
        let b = Mat::<f64>::from_fn(rf.len(), 1, |i, _| rf[i]);
        let sol = self.lu.solve(&b);
        let xf: Vec<f64> = (0..rf.len()).map(|i| sol[(i, 0)]).collect();
        self.check(&xf, &rf)?;
        let mut x = vec![0.0; n];
        for (k, &g) in self.layout.free.iter().enumerate() {
            if g < n {
                x[g] = xf[k];
            }
        }
        for (dof, v) in dvals {
            x[dof] = v;
        }
        Ok(x)
    }

    fn check(&self, x: &[f64], rhs: &[f64]) -> Result<()> {
        let singular = |reason: String| Error::Singular {
            digest: format!("'{}' ({})", self.scenario.name, self.coeffs.digest()),
            reason,
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(singular("non-finite solution".into()));
        }
        let r = self.k_ff.mul_vec(x);
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let res: f64 = norm(&r.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>());
        let scale = norm(rhs).max(norm(&r));
        if scale > 0.0 && res > RESIDUAL_TOL * scale {
            return Err(singular(format!("relative residual {:e}", res / scale)));
        }
        Ok(())
    }

    /// One implicit Euler step from `prev` (whose fluid content is `content`).
    pub fn step_with_content(&self, content: &[f64], t_next: f64) -> Result<FieldSolution> {
        let SystemKind::Step { dt } = self.kind else {
            return Err(Error::InvalidInput("step() needs a time-stepping factorization".into()));
        };
        let disc = self.scenario.discretization();
        let nu = disc.dofs().n_u();
        let mut rhs = vec![0.0; disc.dofs().n_dofs()];
        rhs[..nu].copy_from_slice(&self.momentum_load(t_next));
        let g = self.fluid_load(t_next)?;
        for (i, (gi, mi)) in g.iter().zip(content).enumerate() {
            rhs[nu + i] = -dt * gi - mi;
        }
        Ok(FieldSolution {
            time: t_next,
            values: self.solve_full(&rhs, t_next)?,
        })
    }

    /// One implicit Euler step from a previous state.
    pub fn step(&self, prev: &FieldSolution) -> Result<FieldSolution> {
        let t_next = prev.time + self.scenario.dt();
        self.step_with_content(&self.fluid_content(prev), t_next)
    }

    /// All states from t = 0 (zero fields, fluid content φ₀) to t_final.
    pub fn solve_transient(&self) -> Result<Vec<FieldSolution>> {
        let s = self.scenario;
        let n = s.discretization().dofs().n_dofs();
        let mut states = vec![FieldSolution {
            time: 0.0,
            values: vec![0.0; n],
        }];
        let mut content = self.initial_fluid_content();
        for k in 1..=s.steps {
            // fixed grid t_k = k dt avoids drift from repeated addition
            let t = s.t_final * (k as f64 / s.steps as f64);
            let next = self.step_with_content(&content, t)?;
            content = self.fluid_content(&next);
            states.push(next);
        }
        Ok(states)
    }

    /// Steady state at time `t` (requires a steady factorization).
    pub fn solve_steady(&self, t: f64) -> Result<FieldSolution> {
        if self.kind != SystemKind::Steady {
            return Err(Error::InvalidInput("solve_steady() needs a steady factorization".into()));
        }
        let disc = self.scenario.discretization();
        let nu = disc.dofs().n_u();
        let mut rhs = vec![0.0; disc.dofs().n_dofs()];
        rhs[..nu].copy_from_slice(&self.momentum_load(t));
        for (i, gi) in self.fluid_load(t)?.iter().enumerate() {
            rhs[nu + i] = -gi;
        }
        Ok(FieldSolution {
            time: t,
            values: self.solve_full(&rhs, t)?,
        })
    }

    /// Momentum residual A u + Bᵀ p - F restricted to free displacement DOFs.
    pub fn momentum_residual(&self, state: &FieldSolution) -> Vec<f64> {
        let disc = self.scenario.discretization();
        let c = &self.coeffs;
        let u = state.displacement(disc);
        let p = state.pressure(disc);
        let mut r = disc.a_mu.mul_vec(u);
        let al = disc.a_lambda.mul_vec(u);
        let bt = disc.b.mul_vec_t(p);
        let f = self.momentum_load(state.time);
        for i in 0..r.len() {
            r[i] = c.mu * r[i] + c.lambda * al[i] + c.alpha * bt[i] - f[i];
        }
        (0..r.len())
            .filter(|&i| self.layout.free_of[i] != usize::MAX)
            .map(|i| r[i])
            .collect()
    }
}

/// Convenience: factor and run the transient problem for one sample.
pub fn solve_transient(scenario: &Scenario, coeffs: BiotCoefficients) -> Result<Vec<FieldSolution>> {
    BiotSolver::new(scenario, coeffs)?.solve_transient()
}

fn add(a: &mut [f64], b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn to_faer(k: &CsrMatrix) -> Result<SparseColMat<usize, f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> = k.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    SparseColMat::<usize, f64>::try_new_from_triplets(k.nrows(), k.ncols(), &triplets)
        .map_err(|e| Error::Internal(format!("sparse matrix construction: {e:?}")))
}

/// Plain sparse LU for auxiliary solves (mass matrices).
pub(crate) struct SparseLu {
    lu: Lu<usize, f64>,
}

impl SparseLu {
    pub(crate) fn new(k: &CsrMatrix) -> Result<Self> {
        let mat = to_faer(k)?;
        let sym = SymbolicLu::try_new(mat.symbolic()).map_err(|e| Error::Internal(format!("symbolic factorization: {e:?}")))?;
        let lu = Lu::try_new_with_symbolic(sym, mat.as_ref()).map_err(|e| Error::Internal(format!("numeric factorization: {e:?}")))?;
        Ok(SparseLu { lu })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }
}

fn factor(s: &Scenario, k: &CsrMatrix, coeffs: &BiotCoefficients) -> Result<Lu<usize, f64>> {
    let mat = to_faer(k)?;
    let singular = |reason: String| Error::Singular {
        digest: format!("'{}' ({})", s.name, coeffs.digest()),
        reason,
    };
    let symbolic = {
        let mut cache = s.symbolic.lock().map_err(|_| Error::Internal("symbolic cache poisoned".into()))?;
        let sym = mat.symbolic();
        let hit = cache
            .entry
            .as_ref()
            .filter(|(cp, ri, _)| cp.as_slice() == sym.col_ptr() && ri.as_slice() == sym.row_idx())
            .map(|(_, _, lu)| lu.clone());
        match hit {
            Some(lu) => lu,
            None => {
                let lu = SymbolicLu::try_new(sym).map_err(|e| singular(format!("symbolic factorization: {e:?}")))?;
                cache.entry = Some((sym.col_ptr().to_vec(), sym.row_idx().to_vec(), lu.clone()));
                lu
            }
        }
    };
    Lu::try_new_with_symbolic(symbolic, mat.as_ref()).map_err(|e| singular(format!("numeric factorization: {e:?}")))
}
