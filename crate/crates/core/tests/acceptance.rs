//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p biot-uq --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biot_uq::basis::{ChaosExpansion, SobolKind};
use biot_uq::coefficients::{c0_roots, draw_samples, sample_params, UncertaintyModel};
use biot_uq::driver::{convergence_sweep, run_campaign, stubs, BiotModel, CampaignResult, Statistics, ValidationSet};
use biot_uq::fem::manufactured::verification_coefficients;
use biot_uq::fem::{space_convergence, BiotCoefficients, BiotSolver, Manufactured, Scenario};
use biot_uq::quadrature::{discrete_orthonormality, psp_project, ModelEvaluations, SparseGrid};

// criterion 1
const MOMENT_REL: f64 = 1e-6;
const REPORTED_MEANS: [f64; 4] = [21.497, 42.995, 0.63636, 0.21497];
const REPORTED_CV: [f64; 4] = [1.16, 1.16, 0.33, 1.16];
// criterion 2
const C0_DRAWS: usize = 100_000;
const GASSMANN_TOL: f64 = 1e-10;
const C0_RANGE: (f64, f64) = (2e-4, 3e-1);
// criterion 3
const PSP_REL: f64 = 1e-12;
const ORTHO_TOL: f64 = 1e-12;
const RANDOM_POLYNOMIALS: usize = 50;
// criterion 4
const N_STAR: usize = 500;
const LHS_SEED: u64 = 2024;
const MAX_SLOPE: f64 = -0.8;
// criterion 5
const ORDER_U: f64 = 2.8;
const ORDER_P: f64 = 1.8;
const POLY_TOL: f64 = 1e-10;
// criterion 6
const SYMMETRY_TOL: f64 = 1e-8;
// criterion 7
const CS_SLACK: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn coefficient_moments() -> Outcome {
    let model = UncertaintyModel::validation();
    let grid = SparseGrid::new(4, 3).unwrap();
    let payloads = grid
        .nodes()
        .iter()
        .map(|x| {
            let s = sample_params(x, &model).expect("admissible");
            vec![s.mu, s.lambda, s.alpha, s.kappa]
        })
        .collect();
    let evals = ModelEvaluations::from_payloads(payloads);
    let e = psp_project(&grid, &evals).unwrap();
    let (mean, var) = (e.mean(), e.variance());
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, t) in model.transforms().iter().enumerate() {
        let (m_exact, v_exact) = t.moments(model.porosity);
        let rel_mean = ((mean[i] - m_exact) / m_exact).abs();
        let cv = var[i].sqrt() / mean[i];
        let cv_exact = v_exact.sqrt() / m_exact;
        let rounded = (cv * 100.0).round() / 100.0;
        let reported = ((mean[i] - REPORTED_MEANS[i]) / REPORTED_MEANS[i]).abs() <= 5e-5;
        pass &= rel_mean <= MOMENT_REL && rounded == REPORTED_CV[i] && reported;
        parts.push(format!(
            "mean {:.6} (rel {rel_mean:.1e}), c_v {cv:.4} (rel {:.1e})",
            mean[i],
            ((cv - cv_exact) / cv_exact).abs()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c0_admissibility() -> Outcome {
    let model = UncertaintyModel::validation();
    let samples = draw_samples(&model, C0_DRAWS, 17).unwrap();
    let phi = model.porosity;
    let kf = model.fluid_modulus;
    let (mut disc_bad, mut lower_bad, mut resid_bad) = (0, 0, 0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for s in &samples {
        if c0_roots(s.bulk_modulus, kf, phi, s.alpha).is_err() {
            disc_bad += 1;
        }
        let bound = (phi / kf).max(s.alpha / s.bulk_modulus);
        if s.c0 < bound {
            lower_bad += 1;
        }
        if s.gassmann_residual() > GASSMANN_TOL {
            resid_bad += 1;
        }
        lo = lo.min(s.c0);
        hi = hi.max(s.c0);
    }
    let in_range = lo > C0_RANGE.0 && hi < C0_RANGE.1;
    outcome(
        disc_bad == 0 && lower_bad == 0 && resid_bad == 0 && in_range,
        format!(
            "{C0_DRAWS} draws: discriminant<0 {disc_bad}, c0 < max(phi/K_f, alpha/K) {lower_bad}, Gassmann residual > {GASSMANN_TOL:e} {resid_bad}, c0 range [{lo:.3e}, {hi:.3e}] vs ({:e}, {:e})",
            C0_RANGE.0, C0_RANGE.1
        ),
    )
}

fn psp_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_coeff = 0.0f64;
    let mut worst_ortho = 0.0f64;
    for dim in [2, 4] {
        for level in 1..=5 {
            let grid = SparseGrid::new(dim, level).unwrap();
            let basis = grid.admissible_set().clone();
            let coeffs: Vec<f64> = (0..basis.len() * RANDOM_POLYNOMIALS).map(|_| rng.random_range(-1.0..1.0)).collect();
            let truth = ChaosExpansion::from_coefficients(basis, RANDOM_POLYNOMIALS, coeffs).unwrap();
            let evals = ModelEvaluations::from_payloads(grid.nodes().iter().map(|x| truth.evaluate(x).unwrap()).collect());
            let got = psp_project(&grid, &evals).unwrap();
            for j in 0..RANDOM_POLYNOMIALS {
                let column = |e: &ChaosExpansion| (0..e.n_modes()).map(|m| e.mode(m)[j]).collect::<Vec<_>>();
                let (a, b) = (column(&truth), column(&got));
                let scale = max_abs(a.iter().copied());
                worst_coeff = worst_coeff.max(max_abs(a.iter().zip(&b).map(|(x, y)| x - y)) / scale);
            }
            for t in grid.tensors() {
                let sub = t.sub_basis();
                for (i, k) in sub.iter().enumerate() {
                    for (j, l) in sub.iter().enumerate() {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        worst_ortho = worst_ortho.max((discrete_orthonormality(t, k, l) - delta).abs());
                    }
                }
            }
        }
    }
    outcome(
        worst_coeff <= PSP_REL && worst_ortho <= ORTHO_TOL,
        format!("N in {{2,4}}, l = 1..5, {RANDOM_POLYNOMIALS} polynomials each: max relative coefficient error {worst_coeff:.2e}, max orthonormality defect {worst_ortho:.2e}"),
    )
}

fn surrogate_trend() -> Outcome {
    let m = stubs::exponential();
    let set = ValidationSet::draw(&m, N_STAR, LHS_SEED, 0).unwrap();
    let sweep = convergence_sweep(&m, &[1, 2, 3, 4, 5], &set, 0).unwrap();
    let v: Vec<f64> = sweep.rows.iter().map(|r| r.norms[0].1).collect();
    let decreasing = v.windows(2).all(|w| w[1] < w[0]);
    let slope = sweep.log_slope(0);
    outcome(
        decreasing && slope <= MAX_SLOPE,
        format!(
            "MSE norms {}; slope of log10 MSE vs l = {slope:.3}",
            v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn solver_verification() -> Outcome {
    let c = verification_coefficients();
    let table = space_convergence(&Manufactured::smooth(), c, &[4, 8, 16, 32], 1.0, 1).unwrap();
    let (ou, op) = *table.orders().last().unwrap();
    let ms = Manufactured::polynomial();
    let (s, states) = ms.solve(8, c, 1.0, 4).unwrap();
    let poly = ms.max_nodal_error(&s, &states);
    outcome(
        ou >= ORDER_U && op >= ORDER_P && poly <= POLY_TOL,
        format!("orders 16->32: u {ou:.3}, p {op:.3}; polynomial solution max nodal error {poly:.2e}"),
    )
}

fn mean_coefficients(model: &UncertaintyModel) -> BiotCoefficients {
    BiotCoefficients::from(&sample_params(&[0.0; 4], model).unwrap())
}

fn scenario_oracles() -> Outcome {
    // injection: diagonal symmetry
    let s = Scenario::injection(16).unwrap();
    let states = BiotSolver::new(&s, mean_coefficients(&UncertaintyModel::validation()))
        .unwrap()
        .solve_transient()
        .unwrap();
    let disc = s.discretization();
    let d = disc.dofs();
    let mut sym = 0.0f64;
    for st in &states[1..] {
        for (i, x) in disc.mesh().vertices().iter().enumerate() {
            let there = disc.evaluate(&st.values, [x[1], x[0]]).unwrap();
            sym = sym.max((st.values[d.p(i)] - there[2]).abs());
        }
    }

    // footing: first-step pressure one row below the loaded edge
    let cells = 20;
    let f = Scenario::footing(cells).unwrap();
    let first = &BiotSolver::new(&f, mean_coefficients(&UncertaintyModel::validation()))
        .unwrap()
        .solve_transient()
        .unwrap()[1];
    let fd = f.discretization();
    let y = 1.0 - 1.0 / cells as f64;
    let row: Vec<f64> = fd
        .mesh()
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, x)| (x[1] - y).abs() < 1e-12 && x[0] >= 0.3 - 1e-12 && x[0] <= 0.7 + 1e-12)
        .map(|(i, _)| first.values[fd.dofs().p(i)])
        .collect();
    let sign_changes = row.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();

    // injection-extraction: steady centerline pressure between the wells
    let ie = Scenario::injection_extraction(10, Scenario::DEFAULT_WELLS).unwrap();
    let st = BiotSolver::steady(&ie, mean_coefficients(&UncertaintyModel::realistic()))
        .unwrap()
        .solve_steady(1.0)
        .unwrap();
    let id = ie.discretization();
    let line: Vec<f64> = (0..=180)
        .map(|k| id.evaluate(&st.values, [1.1 + 1.8 * k as f64 / 180.0, 0.5]).unwrap()[2])
        .collect();
    let monotone = line.windows(2).all(|w| w[1] > w[0]);

    let triangles = [s.mesh().n_triangles(), f.mesh().n_triangles(), ie.mesh().n_triangles()];
    outcome(
        sym <= SYMMETRY_TOL && sign_changes == 0 && !row.is_empty() && monotone && triangles.iter().all(|&t| t <= 2000),
        format!(
            "injection max |p(x) - p(swap x)| {sym:.2e}; footing {} pressures below the load, {sign_changes} sign changes, min {:.3e}; centerline {} from {:.2e} to {:.2e}; triangles {triangles:?}",
            row.len(),
            row.iter().copied().fold(f64::INFINITY, f64::min),
            if monotone { "increasing" } else { "NOT monotone" },
            line[0],
            line[line.len() - 1]
        ),
    )
}

fn mini_campaign() -> Outcome {
    let model = BiotModel::new(Scenario::injection(8).unwrap(), UncertaintyModel::validation()).unwrap();
    let a = run_campaign(&model, 2, 1).unwrap();
    let b = run_campaign(&model, 2, 4).unwrap();
    let c = run_campaign(&model, 2, 4).unwrap();
    let bits = |r: &CampaignResult| r.expansion.coefficients().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let identical = bits(&a) == bits(&b) && bits(&b) == bits(&c);

    let stats = a.statistics(0).unwrap();
    let min_var = stats
        .variance
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let mut cs_bad = 0;
    for (x, y, cov) in &stats.covariance {
        let vx = Statistics::get(&stats.variance, x).unwrap();
        let vy = Statistics::get(&stats.variance, y).unwrap();
        for (k, c) in cov.iter().enumerate() {
            if c.abs() > (vx[k] * vy[k]).sqrt() + CS_SLACK {
                cs_bad += 1;
            }
        }
    }

    let block = a.final_block();
    let var = block.variance();
    let first: Vec<Vec<f64>> = (0..4).map(|i| block.sobol_partial_variance(i, SobolKind::First).unwrap()).collect();
    let total: Vec<Vec<f64>> = (0..4).map(|i| block.sobol_partial_variance(i, SobolKind::Total).unwrap()).collect();
    let mut sobol_bad = 0;
    for k in 0..var.len() {
        let fs: f64 = first.iter().map(|f| f[k]).sum();
        let ts: f64 = total.iter().map(|t| t[k]).sum();
        let slack = 1e-12 * var[k].abs().max(f64::MIN_POSITIVE);
        if fs > var[k] + slack || var[k] > ts + slack {
            sobol_bad += 1;
        }
    }
    outcome(
        identical && min_var >= 0.0 && cs_bad == 0 && sobol_bad == 0,
        format!(
            "{} nodes, {} DOFs per sample; min variance {min_var:.2e}; Cauchy-Schwarz violations {cs_bad}; Sobol ordering violations {sobol_bad}; reruns bitwise identical: {identical}",
            a.n_nodes,
            var.len()
        ),
    )
}

fn grid_report() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_biot-uq"))
        .args(["grid", "--dim", "4", "--max-level", "5"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let count = |l: usize| {
        text.lines()
            .find_map(|line| {
                let f: Vec<&str> = line.split_whitespace().collect();
                (f.first() == Some(&l.to_string().as_str()))
                    .then(|| f[1].parse::<usize>().ok())
                    .flatten()
            })
            .unwrap_or(0)
    };
    let counts: Vec<usize> = (1..=5).map(count).collect();
    let listed = text.contains("209") && text.contains("2561");
    let matches = counts[2] == 209 && counts[4] == 2561;
    let documented = text.contains("note:");
    outcome(
        out.status.success() && listed && (matches || documented),
        format!(
            "N_q(l=1..5) = {counts:?}; reported 209 / 2561 {}; {}",
            if listed { "printed alongside" } else { "MISSING" },
            if matches {
                "counts match"
            } else if documented {
                "convention discrepancy documented"
            } else {
                "silent divergence"
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coefficient moments", Duration::from_secs(1), coefficient_moments),
        ("c0 admissibility", Duration::from_secs(5), c0_admissibility),
        ("PSP exactness", Duration::from_secs(30), psp_exactness),
        ("surrogate convergence trend", Duration::from_secs(60), surrogate_trend),
        ("deterministic solver verification", Duration::from_secs(120), solver_verification),
        ("scenario oracles", Duration::from_secs(180), scenario_oracles),
        ("end-to-end mini-campaign", Duration::from_secs(600), mini_campaign),
        ("grid-size report", Duration::from_secs(60), grid_report),
    ];
    let mut failed = 0;
    for (n, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.2}s of {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
