//! Manufactured solutions u = θ(t) U(x), p = θ(t) P(x) on the unit square
//! with Dirichlet data everywhere; loads come from the strong form
//!
//!   -div(2μ ε(u) + λ div u I) + α ∇p = f,
//!   ∂t(c0 p + α div u) - κ Δp = g.

use std::f64::consts::PI;

use serde::Serialize;

use super::mesh::{Point, TriMesh};
use super::scenario::{Constraint, Data, DisplacementBc, PressureBc, Scenario};
use super::solver::{BiotCoefficients, BiotSolver, FieldSolution};
use crate::coefficients::{sample_params, UncertaintyModel};
use crate::error::Result;

/// `hess_u(x)[i][j][k]` = ∂j ∂k Uᵢ.
#[derive(Clone, Copy, Debug)]
pub struct Manufactured {
    pub name: &'static str,
    pub u: fn(Point) -> [f64; 2],
    pub div_u: fn(Point) -> f64,
    pub hess_u: fn(Point) -> [[[f64; 2]; 2]; 2],
    pub p: fn(Point) -> f64,
    pub grad_p: fn(Point) -> [f64; 2],
    pub lap_p: fn(Point) -> f64,
    pub theta: fn(f64) -> f64,
    pub dtheta: fn(f64) -> f64,
}

fn linear_t(t: f64) -> f64 {
    t
}

fn one(_: f64) -> f64 {
    1.0
}

impl Manufactured {
    /// Trigonometric fields, linear in time (no time discretization error).
    pub fn smooth() -> Self {
        Manufactured {
            name: "smooth",
            u: |x| {
                let (s1, c1, s2, c2) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
                [s1 * c2, c1 * s2]
            },
            div_u: |x| 2.0 * PI * (PI * x[0]).cos() * (PI * x[1]).cos(),
            hess_u: |x| {
                let (s1, c1, s2, c2) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
                let k = -PI * PI;
                [
                    [[k * s1 * c2, k * c1 * s2], [k * c1 * s2, k * s1 * c2]],
                    [[k * c1 * s2, k * s1 * c2], [k * s1 * c2, k * c1 * s2]],
                ]
            },
            p: |x| (PI * x[0]).cos() * (PI * x[1]).cos(),
            grad_p: |x| {
                [
                    -PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                    -PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                ]
            },
            lap_p: |x| -2.0 * PI * PI * (PI * x[0]).cos() * (PI * x[1]).cos(),
            theta: linear_t,
            dtheta: one,
        }
    }

    /// Same fields with θ = sin t, for time refinement.
    pub fn smooth_in_time() -> Self {
        Manufactured {
            name: "smooth-sin-t",
            theta: f64::sin,
            dtheta: f64::cos,
            ..Manufactured::smooth()
        }
    }

    /// Quadratic displacement, linear pressure: exactly representable.
    pub fn polynomial() -> Self {
        Manufactured {
            name: "polynomial",
            u: |x| [x[1] * x[1] + 0.5 * x[0], x[0] * x[0] + 0.3 * x[0] * x[1]],
            div_u: |x| 0.5 + 0.3 * x[0],
            hess_u: |_| [[[0.0, 0.0], [0.0, 2.0]], [[2.0, 0.3], [0.3, 0.0]]],
            p: |x| 1.0 + x[0] - 2.0 * x[1],
            grad_p: |_| [1.0, -2.0],
            lap_p: |_| 0.0,
            theta: linear_t,
            dtheta: one,
        }
    }

    pub fn exact_u(&self, x: Point, t: f64) -> [f64; 2] {
        let u = (self.u)(x);
        let th = (self.theta)(t);
        [th * u[0], th * u[1]]
    }

    pub fn exact_p(&self, x: Point, t: f64) -> f64 {
        (self.theta)(t) * (self.p)(x)
    }

    pub fn body_force(&self, c: &BiotCoefficients, x: Point, t: f64) -> [f64; 2] {
        let h = (self.hess_u)(x);
        let gp = (self.grad_p)(x);
        let th = (self.theta)(t);
        let mut f = [0.0; 2];
        for (i, fi) in f.iter_mut().enumerate() {
            let mut v = c.alpha * gp[i];
            for j in 0..2 {
                v -= c.mu * (h[i][j][j] + h[j][i][j]);
                v -= c.lambda * h[j][i][j];
            }
            *fi = th * v;
        }
        f
    }

    pub fn source(&self, c: &BiotCoefficients, x: Point, t: f64) -> f64 {
        (self.dtheta)(t) * (c.c0 * (self.p)(x) + c.alpha * (self.div_u)(x)) - (self.theta)(t) * c.kappa * (self.lap_p)(x)
    }

    /// Scenario on the unit square with `cells` × `cells` squares.
    pub fn scenario(&self, cells: usize, c: BiotCoefficients, t_final: f64, steps: usize) -> Result<Scenario> {
        let mut s = Scenario::new(self.name, TriMesh::unit_square(cells)?, t_final, steps);
        let ms = *self;
        for side in ["bottom", "right", "top", "left"] {
            s.displacement.push(DisplacementBc {
                tag: side.into(),
                kind: Constraint::Clamped,
                value: Data::field(move |x, t| ms.exact_u(x, t)),
            });
            s.pressure.push(PressureBc {
                tag: side.into(),
                value: Data::field(move |x, t| ms.exact_p(x, t)),
            });
        }
        s.body_force = Some(Data::field(move |x, t| ms.body_force(&c, x, t)));
        s.source = Some(Data::field(move |x, t| ms.source(&c, x, t)));
        s.initial_fluid_content = Some(Data::field(move |x, _| {
            let th = (ms.theta)(0.0);
            th * (c.c0 * (ms.p)(x) + c.alpha * (ms.div_u)(x))
        }));
        Ok(s)
    }

    /// Runs the scenario and returns all states.
    pub fn solve(&self, cells: usize, c: BiotCoefficients, t_final: f64, steps: usize) -> Result<(Scenario, Vec<FieldSolution>)> {
        let s = self.scenario(cells, c, t_final, steps)?;
        let states = BiotSolver::new(&s, c)?.solve_transient()?;
        Ok((s, states))
    }

    /// L² errors of displacement and pressure for one state.
    pub fn errors(&self, s: &Scenario, state: &FieldSolution) -> (f64, f64) {
        let t = state.time;
        s.discretization()
            .l2_errors(&state.values, |x| self.exact_u(x, t), |x| self.exact_p(x, t))
    }

    /// Max nodal deviation from the interpolant of the exact solution, over all states.
    pub fn max_nodal_error(&self, s: &Scenario, states: &[FieldSolution]) -> f64 {
        let disc = s.discretization();
        states
            .iter()
            .map(|st| {
                let exact = disc.interpolate(|x| self.exact_u(x, st.time), |x| self.exact_p(x, st.time));
                exact.iter().zip(&st.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub steps: usize,
    pub error_u: f64,
    pub error_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Observed orders `(u, p)` between consecutive rows, with the refinement
    /// ratio taken from cells (space) or steps (time).
    pub fn orders(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .map(|w| {
                let ratio = if w[1].cells != w[0].cells {
                    w[1].cells as f64 / w[0].cells as f64
                } else {
                    w[1].steps as f64 / w[0].steps as f64
                };
                (
                    (w[0].error_u / w[1].error_u).ln() / ratio.ln(),
                    (w[0].error_p / w[1].error_p).ln() / ratio.ln(),
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("cells,steps,error_u,error_p,order_u,order_p\n");
        let orders = self.orders();
        for (k, r) in self.rows.iter().enumerate() {
            let (ou, op) = if k == 0 {
                (String::new(), String::new())
            } else {
                (format!("{:.4}", orders[k - 1].0), format!("{:.4}", orders[k - 1].1))
            };
            out.push_str(&format!("{},{},{:e},{:e},{ou},{op}\n", r.cells, r.steps, r.error_u, r.error_p));
        }
        out
    }
}

/// Uniform mesh refinement at fixed time stepping; errors at final time.
pub fn space_convergence(ms: &Manufactured, c: BiotCoefficients, cells: &[usize], t_final: f64, steps: usize) -> Result<ConvergenceTable> {
    let rows = cells
        .iter()
        .map(|&n| {
            let (s, states) = ms.solve(n, c, t_final, steps)?;
            let (error_u, error_p) = ms.errors(&s, states.last().expect("at least one state"));
            Ok(ConvergenceRow {
                cells: n,
                steps,
                error_u,
                error_p,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceTable { rows })
}

/// Time-step refinement on a fixed mesh. Spatial error would mask the
/// temporal one, so row `k` holds the L² distance between the final states at
/// `steps[k]` and `steps[k + 1]` (self-convergence), one row fewer than `steps`.
pub fn time_convergence(ms: &Manufactured, c: BiotCoefficients, cells: usize, t_final: f64, steps: &[usize]) -> Result<ConvergenceTable> {
    let finals = steps
        .iter()
        .map(|&k| {
            let (s, mut states) = ms.solve(cells, c, t_final, k)?;
            Ok((s, states.pop().expect("at least one state")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = finals
        .windows(2)
        .zip(steps)
        .map(|(w, &k)| {
            let diff: Vec<f64> = w[0].1.values.iter().zip(&w[1].1.values).map(|(a, b)| a - b).collect();
            let (error_u, error_p) = w[0].0.discretization().l2_norms(&diff);
            ConvergenceRow {
                cells,
                steps: k,
                error_u,
                error_p,
            }
        })
        .collect();
    Ok(ConvergenceTable { rows })
}

/// Mean sample of the validation model: the coefficient regime of the
/// verification runs.
pub fn verification_coefficients() -> BiotCoefficients {
    let model = UncertaintyModel::validation();
    let sample = sample_params(&[0.0; UncertaintyModel::DIM], &model).expect("validation model is admissible at its center");
    BiotCoefficients::from(&sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    // central differences of the hand-written derivatives
    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for ms in [Manufactured::smooth(), Manufactured::polynomial()] {
            for x in [[0.3, 0.7], [0.81, 0.12]] {
                let d = |f: &dyn Fn(Point) -> f64, k: usize| {
                    let (mut a, mut b) = (x, x);
                    a[k] += h;
                    b[k] -= h;
                    (f(a) - f(b)) / (2.0 * h)
                };
                let div = d(&|y| (ms.u)(y)[0], 0) + d(&|y| (ms.u)(y)[1], 1);
                assert!((div - (ms.div_u)(x)).abs() < 1e-6);
                let gp = (ms.grad_p)(x);
                for k in 0..2 {
                    assert!((d(&|y| (ms.p)(y), k) - gp[k]).abs() < 1e-6);
                }
                let lap = d(&|y| (ms.grad_p)(y)[0], 0) + d(&|y| (ms.grad_p)(y)[1], 1);
                assert!((lap - (ms.lap_p)(x)).abs() < 1e-6);
                let hess = (ms.hess_u)(x);
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            let fd = d(
                                &|y| {
                                    let (mut a, mut b) = (y, y);
                                    a[j] += h;
                                    b[j] -= h;
                                    ((ms.u)(a)[i] - (ms.u)(b)[i]) / (2.0 * h)
                                },
                                k,
                            );
                            assert!((fd - hess[i][j][k]).abs() < 1e-5, "{} {i}{j}{k}", ms.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn polynomial_solution_is_exact() {
        for cells in [2, 5] {
            let ms = Manufactured::polynomial();
            let (s, states) = ms.solve(cells, verification_coefficients(), 1.0, 3).unwrap();
            assert!(ms.max_nodal_error(&s, &states) <= 1e-10);
        }
    }

    #[test]
    fn coarse_space_orders() {
        let t = space_convergence(&Manufactured::smooth(), verification_coefficients(), &[4, 8, 16], 1.0, 1).unwrap();
        let (ou, op) = *t.orders().last().unwrap();
        assert!(ou > 2.8 && op > 1.8, "{ou} {op}");
        assert_eq!(t.to_csv().lines().count(), 4);
    }

    // P1 pressure converges at O(h) in H¹; through the coupling this caps the
    // displacement L² rate at 2 once Darcy diffusion dominates. Without
    // coupling the P2 rate 3 is recovered.
    #[test]
    fn displacement_rate_depends_on_coupling() {
        let base = BiotCoefficients {
            mu: 1.0,
            lambda: 2.0,
            alpha: 0.7,
            kappa: 0.5,
            c0: 0.3,
        };
        let rate = |c: BiotCoefficients| {
            let t = space_convergence(&Manufactured::smooth(), c, &[8, 16, 32], 1.0, 1).unwrap();
            t.orders().last().unwrap().0
        };
        let coupled = rate(base);
        let decoupled = rate(BiotCoefficients { alpha: 0.0, ..base });
        assert!(coupled < 2.4, "{coupled}");
        assert!(decoupled > 2.9, "{decoupled}");
    }

    #[test]
    fn time_self_convergence_first_order() {
        let t = time_convergence(
            &Manufactured::smooth_in_time(),
            verification_coefficients(),
            6,
            1.0,
            &[4, 8, 16, 32],
        )
        .unwrap();
        assert_eq!(t.rows.len(), 3);
        let (ou, op) = *t.orders().last().unwrap();
        assert!((ou - 1.0).abs() < 0.2 && (op - 1.0).abs() < 0.2, "{ou} {op}");
    }
}
