//! Discrete energy balance: ∫ a(u,u) + c(p,p) dt against the data functional
//! ∫ (C_K / 2μ) ‖f‖² + (K / α) ‖G‖² dt with G(t) = ∫₀ᵗ g + φ₀.
//!
//! Load functionals are measured in the discrete dual L² norm (Riesz
//! representative through the mass matrix). The Korn constant is a surrogate,
//! so the ratio is for monitoring only.

use serde::Serialize;

use super::scenario::Scenario;
use super::solver::{BiotSolver, FieldSolution, SparseLu};
use super::sparse::CsrMatrix;
use crate::coefficients::{derived_moduli, SPATIAL_DIM};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    /// Σ dt (uᵀ A u + c0 pᵀ M p) over the computed steps.
    pub energy: f64,
    /// Σ dt ((C_K / 2μ) ‖F‖² + (K / α) ‖G‖²).
    pub data: f64,
    pub korn_constant: f64,
}

impl EnergyReport {
    /// energy / data; NaN when both vanish.
    pub fn ratio(&self) -> f64 {
        self.energy / self.data
    }
}

/// ‖v‖² in the dual norm of the mass matrix `m`: vᵀ M⁻¹ v.
fn dual_norm_sq(lu: &SparseLu, v: &[f64]) -> f64 {
    let w = lu.solve(v);
    v.iter().zip(&w).map(|(a, b)| a * b).sum()
}

/// Vector mass matrix of the displacement space from the scalar P2 mass.
fn vector_mass(scalar: &CsrMatrix) -> CsrMatrix {
    let mut t = Vec::with_capacity(2 * scalar.nnz());
    for (r, c, v) in scalar.iter() {
        t.push((2 * r, 2 * c, v));
        t.push((2 * r + 1, 2 * c + 1, v));
    }
    CsrMatrix::from_triplets(2 * scalar.nrows(), 2 * scalar.ncols(), &t)
}

pub fn energy_diagnostic(
    solver: &BiotSolver<'_>,
    scenario: &Scenario,
    states: &[FieldSolution],
    korn_constant: f64,
) -> Result<EnergyReport> {
    if states.len() != scenario.steps + 1 {
        return Err(Error::DimensionMismatch {
            expected: scenario.steps + 1,
            got: states.len(),
        });
    }
    let disc = scenario.discretization();
    let c = solver.coefficients();
    let (bulk, _) = derived_moduli(c.mu, c.lambda, SPATIAL_DIM);
    let dt = scenario.dt();
    let mu_lu = SparseLu::new(&vector_mass(&disc.mass_u))?;
    let mp_lu = SparseLu::new(&disc.mass_p)?;

    let mut energy = 0.0;
    let mut data = 0.0;
    let mut g_int = solver.initial_fluid_content();
    for state in &states[1..] {
        let u = state.displacement(disc);
        let p = state.pressure(disc);
        energy += dt * (c.mu * disc.a_mu.bilinear(u, u) + c.lambda * disc.a_lambda.bilinear(u, u) + c.c0 * disc.mass_p.bilinear(p, p));
        for (gi, si) in g_int.iter_mut().zip(solver.fluid_load(state.time)?) {
            *gi += dt * si;
        }
        let f = solver.momentum_load(state.time);
        data += dt * (korn_constant / (2.0 * c.mu) * dual_norm_sq(&mu_lu, &f) + bulk / c.alpha * dual_norm_sq(&mp_lu, &g_int));
    }
    Ok(EnergyReport {
        energy,
        data,
        korn_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::solver::BiotCoefficients;

    fn coeffs() -> BiotCoefficients {
        BiotCoefficients {
            mu: 5.0,
            lambda: 8.0,
            alpha: 0.7,
            kappa: 0.2,
            c0: 0.05,
        }
    }

    fn report(s: &Scenario) -> EnergyReport {
        let solver = BiotSolver::new(s, coeffs()).unwrap();
        let states = solver.solve_transient().unwrap();
        energy_diagnostic(&solver, s, &states, 1.0).unwrap()
    }

    #[test]
    fn zero_data_zero_sides() {
        let mut s = Scenario::injection(4).unwrap();
        s.point_sources.clear();
        let r = report(&s);
        assert_eq!((r.energy, r.data), (0.0, 0.0));
    }

    #[test]
    fn halving_data_quarters_both_sides() {
        let s = Scenario::footing(10).unwrap().with_point_source([0.45, 0.55], 2.0);
        let full = report(&s);
        let mut half = s.clone();
        half.point_sources[0].magnitude *= 0.5;
        half.traction[0].value = crate::fem::Data::Constant([0.0, -2.5]);
        let h = report(&half);
        assert!(full.energy > 0.0 && full.data > 0.0);
        assert!((h.energy / full.energy - 0.25).abs() <= 1e-8 * 0.25);
        assert!((h.data / full.data - 0.25).abs() <= 1e-8 * 0.25);
    }

    #[test]
    fn dual_norm_of_mass_row_is_area() {
        // the functional v ↦ ∫ v has Riesz representative 1, so ‖·‖² = |D|
        let s = Scenario::injection(3).unwrap();
        let disc = s.discretization();
        let lu = SparseLu::new(&disc.mass_p).unwrap();
        let ones = disc.source_load(|_| 1.0);
        assert!((dual_norm_sq(&lu, &ones) - 1.0).abs() < 1e-12);
    }
}
