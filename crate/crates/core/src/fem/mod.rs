//! Taylor-Hood finite elements for the quasi-static Biot system with implicit
//! Euler time stepping.

pub mod assembly;
pub mod element;
pub mod energy;
pub mod manufactured;
pub mod mesh;
pub mod output;
pub mod scenario;
pub mod solver;
pub mod sparse;

pub use assembly::{Discretization, DofMap};
pub use energy::{energy_diagnostic, EnergyReport};
pub use manufactured::{space_convergence, time_convergence, ConvergenceRow, ConvergenceTable, Manufactured};
pub use mesh::{BoundaryEdge, Point, TriMesh};
pub use scenario::{Constraint, Data, Scenario, ScenarioConfig};
pub use solver::{solve_transient, BiotCoefficients, BiotSolver, FieldSolution};
pub use sparse::CsrMatrix;
