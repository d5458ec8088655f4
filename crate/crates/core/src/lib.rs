//! Uncertainty propagation through linear Biot poroelasticity.
//!
//! The crate couples a deterministic mixed finite-element Biot solver with
//! sparse pseudo-spectral projection (PSP) on Smolyak grids of nested
//! Clenshaw-Curtis rules. Each grid node is one deterministic solve; the node
//! solutions are projected onto an orthonormal Legendre chaos basis from which
//! means, variances, covariances and Sobol partial variances are read off.
//!
//! Modules, bottom-up:
//!
//! - [`basis`]: Legendre chaos basis, truncation sets, moments.
//! - [`quadrature`]: Clenshaw-Curtis rules, sparse grids, PSP, Latin hypercube designs.
//! - [`coefficients`]: maps canonical variables to admissible poroelastic parameters.
//! - [`fem`]: 2D Taylor-Hood Biot solver with implicit Euler time stepping.
//! - [`driver`]: campaigns, validation error, sensitivity and artifact export.

pub mod basis;
pub mod coefficients;
pub mod driver;
pub mod error;
pub mod fem;
pub mod quadrature;

pub use error::{Error, Result};
