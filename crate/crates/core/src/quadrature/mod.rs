//! Nested Clenshaw-Curtis rules, Smolyak sparse grids and sparse pseudo-spectral projection.

mod clenshaw_curtis;
mod lhs;
mod psp;
mod smolyak;

pub use clenshaw_curtis::{cc_rule, cc_size, degree_cap, Rule1D};
pub use lhs::lhs_samples;
pub use psp::{nisp_project, psp_project, ModelEvaluations};
pub use smolyak::{discrete_orthonormality, SparseGrid, TensorRule, ORTHONORMALITY_TOL};
