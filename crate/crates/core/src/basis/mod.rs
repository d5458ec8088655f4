//! Orthonormal multivariate Legendre chaos basis and moment extraction.

mod expansion;
mod index;
mod legendre;

pub use expansion::{ChaosExpansion, SobolKind};
pub use index::{eval_basis, MultiIndex, TruncationRule, TruncationSet};
pub use legendre::{classical_legendre, legendre_1d, legendre_table};
