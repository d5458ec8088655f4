//! Models mapping a canonical point ξ to a payload vector.

use serde::Serialize;

use crate::coefficients::{sample_params, UncertaintyModel};
use crate::error::{Error, Result};
use crate::fem::{BiotCoefficients, BiotSolver, FieldSolution, Scenario};

use super::superposition::solve_superposed;

/// A named contiguous block of the payload.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSpan {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

/// Payload layout of one output time. Covariances are taken between the
/// first `shared` entries of each field (the mesh vertices for the solver).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldLayout {
    pub fields: Vec<FieldSpan>,
    pub shared: usize,
}

impl FieldLayout {
    pub fn scalar(name: &str) -> Self {
        FieldLayout {
            fields: vec![FieldSpan {
                name: name.into(),
                offset: 0,
                len: 1,
            }],
            shared: 1,
        }
    }

    pub fn width(&self) -> usize {
        self.fields.iter().map(|f| f.offset + f.len).max().unwrap_or(0)
    }

    pub fn field(&self, name: &str) -> Result<&FieldSpan> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("no output field '{name}' (have {:?})", self.names())))
    }

    pub fn names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.name.as_str()).collect()
    }
}

pub trait SampleModel: Sync {
    fn dim(&self) -> usize;

    /// Layout of one output time.
    fn layout(&self) -> FieldLayout;

    /// Output times; the payload concatenates one block per time.
    fn times(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn evaluate(&self, xi: &[f64]) -> Result<Vec<f64>>;

    /// Norms of a one-time block, per field. Euclidean by default.
    fn norms(&self, block: &[f64]) -> Vec<(String, f64)> {
        self.layout()
            .fields
            .iter()
            .map(|f| {
                (
                    f.name.clone(),
                    block[f.offset..f.offset + f.len].iter().map(|v| v * v).sum::<f64>().sqrt(),
                )
            })
            .collect()
    }
}

/// Closure-backed model, mainly for analytic payloads.
pub struct FnModel<F> {
    dim: usize,
    layout: FieldLayout,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> FnModel<F> {
    pub fn new(dim: usize, layout: FieldLayout, f: F) -> Self {
        FnModel { dim, layout, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> SampleModel for FnModel<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn layout(&self) -> FieldLayout {
        self.layout.clone()
    }

    fn evaluate(&self, xi: &[f64]) -> Result<Vec<f64>> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        Ok((self.f)(xi))
    }
}

/// Analytic payloads on four canonical variables.
pub mod stubs {
    use super::{FieldLayout, FnModel};

    pub type Stub = FnModel<fn(&[f64]) -> Vec<f64>>;

    fn stub(f: fn(&[f64]) -> Vec<f64>) -> Stub {
        FnModel::new(4, FieldLayout::scalar("x"), f)
    }

    /// 2 + ξ₃.
    pub fn linear() -> Stub {
        stub(|xi| vec![2.0 + xi[2]])
    }

    /// ξ₁ + 2ξ₂.
    pub fn additive() -> Stub {
        stub(|xi| vec![xi[0] + 2.0 * xi[1]])
    }

    /// ξ₁ξ₂.
    pub fn interaction() -> Stub {
        stub(|xi| vec![xi[0] * xi[1]])
    }

    /// exp(Σξᵢ / 4).
    pub fn exponential() -> Stub {
        stub(|xi| vec![(xi.iter().sum::<f64>() / 4.0).exp()])
    }
}

/// Which states enter the payload.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputTimes {
    #[default]
    Final,
    All,
}

/// The Biot solver as a sample model. Per time the payload is
/// `[u1 on P2 nodes, u2 on P2 nodes, p on vertices]`.
pub struct BiotModel {
    pub scenario: Scenario,
    pub model: UncertaintyModel,
    pub output: OutputTimes,
    /// Two well tags solved as unit problems and recombined.
    pub superposition: Option<[String; 2]>,
}

impl BiotModel {
    pub fn new(scenario: Scenario, model: UncertaintyModel) -> Result<Self> {
        model.validate()?;
        scenario.validate()?;
        Ok(BiotModel {
            scenario,
            model,
            output: OutputTimes::Final,
            superposition: None,
        })
    }

    pub fn coefficients(&self, xi: &[f64]) -> Result<BiotCoefficients> {
        Ok(BiotCoefficients::from(&sample_params(xi, &self.model)?))
    }

    /// All states for one canonical point.
    pub fn states(&self, xi: &[f64]) -> Result<Vec<FieldSolution>> {
        let c = self.coefficients(xi)?;
        match &self.superposition {
            Some(tags) => solve_superposed(&self.scenario, c, [&tags[0], &tags[1]]),
            None => BiotSolver::new(&self.scenario, c)?.solve_transient(),
        }
    }

    /// Reorders an interleaved DOF vector into the payload block layout.
    pub fn block(&self, state: &FieldSolution) -> Vec<f64> {
        let disc = self.scenario.discretization();
        let d = disc.dofs();
        let nn = d.n_unodes();
        let mut out = Vec::with_capacity(2 * nn + d.n_p());
        for comp in 0..2 {
            out.extend((0..nn).map(|n| state.values[d.u(n, comp)]));
        }
        out.extend_from_slice(state.pressure(disc));
        out
    }

    /// Inverse of [`BiotModel::block`].
    pub fn interleave(&self, block: &[f64]) -> Vec<f64> {
        let d = self.scenario.discretization().dofs();
        let nn = d.n_unodes();
        let mut x = vec![0.0; d.n_dofs()];
        for n in 0..nn {
            x[d.u(n, 0)] = block[n];
            x[d.u(n, 1)] = block[nn + n];
        }
        x[d.n_u()..].copy_from_slice(&block[2 * nn..2 * nn + d.n_p()]);
        x
    }
}

impl SampleModel for BiotModel {
    fn dim(&self) -> usize {
        UncertaintyModel::DIM
    }

    fn layout(&self) -> FieldLayout {
        let d = self.scenario.discretization().dofs();
        let nn = d.n_unodes();
        let span = |name: &str, offset, len| FieldSpan {
            name: name.into(),
            offset,
            len,
        };
        FieldLayout {
            fields: vec![span("u1", 0, nn), span("u2", nn, nn), span("p", 2 * nn, d.n_p())],
            shared: d.n_vertices,
        }
    }

    fn times(&self) -> Vec<f64> {
        let s = &self.scenario;
        match self.output {
            OutputTimes::Final => vec![s.t_final],
            OutputTimes::All => (1..=s.steps).map(|k| s.t_final * (k as f64 / s.steps as f64)).collect(),
        }
    }

    fn evaluate(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let states = self.states(xi)?;
        let picked = match self.output {
            OutputTimes::Final => &states[states.len() - 1..],
            OutputTimes::All => &states[1..],
        };
        Ok(picked.iter().flat_map(|s| self.block(s)).collect())
    }

    /// L² norms of displacement and pressure.
    fn norms(&self, block: &[f64]) -> Vec<(String, f64)> {
        let (u, p) = self.scenario.discretization().l2_norms(&self.interleave(block));
        vec![("u".into(), u), ("p".into(), p)]
    }
}
