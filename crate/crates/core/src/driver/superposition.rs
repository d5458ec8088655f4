//! Two-well superposition: with all other data homogeneous, the response to
//! well pressures (p₁, p₂) is p₁ E₁ + p₂ E₂ where Eᵢ solves the problem with
//! unit pressure on well i and zero on the other.

use crate::error::{Error, Result};
use crate::fem::{BiotCoefficients, BiotSolver, Data, FieldSolution, Scenario};

fn constant_zero<T: Copy + PartialEq + Default>(d: &Data<T>) -> bool {
    matches!(d, Data::Constant(v) if *v == T::default())
}

/// Well values and the check that everything else is homogeneous.
fn well_values(s: &Scenario, tags: [&str; 2]) -> Result<[f64; 2]> {
    let bad = |what: &str| Err(Error::InvalidInput(format!("superposition needs {what} in scenario '{}'", s.name)));
    if !s.point_sources.is_empty() || s.body_force.is_some() || s.source.is_some() || s.initial_fluid_content.is_some() {
        return bad("no sources, body force or initial fluid content");
    }
    if !s.traction.iter().all(|t| constant_zero(&t.value)) || !s.displacement.iter().all(|b| constant_zero(&b.value)) {
        return bad("homogeneous mechanical data");
    }
    let mut values = [None, None];
    for bc in &s.pressure {
        match (tags.iter().position(|t| *t == bc.tag), &bc.value) {
            (Some(k), Data::Constant(v)) => values[k] = Some(*v),
            (Some(_), Data::Field(_)) => return bad("constant well pressures"),
            (None, v) if !constant_zero(v) => return bad("zero pressure away from the wells"),
            _ => {}
        }
    }
    match values {
        [Some(a), Some(b)] => Ok([a, b]),
        _ => bad("a pressure condition on both wells"),
    }
}

/// Unit-well scenario: pressure 1 on `tags[k]`, 0 on the other.
pub fn unit_problem(s: &Scenario, tags: [&str; 2], k: usize) -> Scenario {
    let mut e = s.clone();
    for bc in &mut e.pressure {
        if let Some(j) = tags.iter().position(|t| *t == bc.tag) {
            bc.value = Data::Constant(if j == k { 1.0 } else { 0.0 });
        }
    }
    e
}

/// Transient states synthesized from the two unit problems.
pub fn solve_superposed(s: &Scenario, c: BiotCoefficients, tags: [&str; 2]) -> Result<Vec<FieldSolution>> {
    let [v1, v2] = well_values(s, tags)?;
    let e1 = BiotSolver::new(&unit_problem(s, tags, 0), c)?.solve_transient()?;
    let e2 = BiotSolver::new(&unit_problem(s, tags, 1), c)?.solve_transient()?;
    Ok(e1
        .into_iter()
        .zip(e2)
        .map(|(a, b)| FieldSolution {
            time: a.time,
            values: a.values.iter().zip(&b.values).map(|(x, y)| v1 * x + v2 * y).collect(),
        })
        .collect())
}
