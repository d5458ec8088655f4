//! Random poroelastic coefficients: canonical-variable transforms, the storage
//! coefficient c0 from the Gassmann quadratic, and derived moduli.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial dimension of the solver; enters the bulk modulus.
pub const SPATIAL_DIM: usize = 2;

const DISCRIMINANT_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-12;

/// Map from one canonical variable ξ ∈ [-1, 1] to a coefficient value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transform {
    /// `10^(a + (ξ+1)/2 (b - a))` with `a = log10 min`, `b = log10 max`.
    LogUniform { min: f64, max: f64 },
    /// Affine map onto `[min, max]`; a missing `min` means the Zimmerman bound.
    Uniform {
        #[serde(default)]
        min: Option<f64>,
        max: f64,
    },
}

impl Transform {
    pub fn apply(&self, xi: f64, phi: f64) -> f64 {
        let t = 0.5 * (xi + 1.0);
        match *self {
            Transform::LogUniform { min, max } => {
                let (a, b) = (min.log10(), max.log10());
                10f64.powf(a + t * (b - a))
            }
            Transform::Uniform { min, max } => {
                let lo = min.unwrap_or_else(|| zimmerman_bound(phi));
                lo + t * (max - lo)
            }
        }
    }

    /// Closed-form mean and variance under ξ ~ U(-1, 1).
    pub fn moments(&self, phi: f64) -> (f64, f64) {
        match *self {
            Transform::LogUniform { min, max } => {
                let r = (max / min).ln();
                let mean = (max - min) / r;
                let second = (max * max - min * min) / (2.0 * r);
                (mean, second - mean * mean)
            }
            Transform::Uniform { min, max } => {
                let lo = min.unwrap_or_else(|| zimmerman_bound(phi));
                (0.5 * (lo + max), (max - lo).powi(2) / 12.0)
            }
        }
    }

    fn range(&self, phi: f64) -> (f64, f64) {
        (self.apply(-1.0, phi), self.apply(1.0, phi))
    }
}

/// One canonical variable per uncertain coefficient, in the order μ, λ, α, κ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyModel {
    pub units: String,
    pub porosity: f64,
    pub fluid_modulus: f64,
    pub mu: Transform,
    pub lambda: Transform,
    pub alpha: Transform,
    pub kappa: Transform,
}

impl UncertaintyModel {
    pub const DIM: usize = 4;

    /// kPa, m, s. μ in [1, 100], λ in [2, 200], α uniform above the Zimmerman
    /// bound, κ in [0.01, 1]; φ = 0.2 and water with K_f = 2.2 GPa.
    pub fn validation() -> Self {
        UncertaintyModel {
            units: "kPa-m-s".into(),
            porosity: 0.2,
            fluid_modulus: 2.2e6,
            mu: Transform::LogUniform { min: 1.0, max: 100.0 },
            lambda: Transform::LogUniform { min: 2.0, max: 200.0 },
            alpha: Transform::Uniform { min: None, max: 1.0 },
            kappa: Transform::LogUniform { min: 0.01, max: 1.0 },
        }
    }

    /// GPa, km, day. All four coefficients log-uniform over half a decade-pair,
    /// φ = 2/29 so every α realization clears the Zimmerman bound.
    pub fn realistic() -> Self {
        UncertaintyModel {
            units: "GPa-km-day".into(),
            porosity: 2.0 / 29.0,
            fluid_modulus: 2.2,
            mu: Transform::LogUniform { min: 3.75, max: 37.5 },
            lambda: Transform::LogUniform { min: 2.5, max: 25.0 },
            alpha: Transform::LogUniform { min: 0.1, max: 1.0 },
            kappa: Transform::LogUniform { min: 0.05, max: 0.5 },
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "validation" => Ok(Self::validation()),
            "realistic" => Ok(Self::realistic()),
            other => Err(Error::InvalidInput(format!("unknown model preset '{other}'"))),
        }
    }

    pub fn transforms(&self) -> [&Transform; 4] {
        [&self.mu, &self.lambda, &self.alpha, &self.kappa]
    }

    /// Rejects models whose ranges leave the admissible set.
    pub fn validate(&self) -> Result<()> {
        let phi = self.porosity;
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::Inadmissible(format!("porosity {phi} outside (0, 1)")));
        }
        if !(self.fluid_modulus > 0.0) {
            return Err(Error::Inadmissible("fluid modulus must be positive".into()));
        }
        for (name, t) in ["mu", "lambda", "kappa"].iter().zip([&self.mu, &self.lambda, &self.kappa]) {
            let (lo, hi) = t.range(phi);
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::Inadmissible(format!("{name} range [{lo}, {hi}] not positive")));
            }
        }
        let (lo, hi) = self.alpha.range(phi);
        let amin = zimmerman_bound(phi);
        if lo < amin * (1.0 - 1e-14) || hi > 1.0 || hi < lo {
            return Err(Error::Inadmissible(format!("alpha range [{lo}, {hi}] outside [{amin}, 1]")));
        }
        Ok(())
    }
}

/// One realization of the poroelastic coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoroelasticSample {
    pub mu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub porosity: f64,
    pub fluid_modulus: f64,
    pub c0: f64,
    pub bulk_modulus: f64,
    /// Infinite for incompressible grains (α = 1).
    pub matrix_modulus: f64,
    pub drained_modulus: f64,
    pub poisson: f64,
}

impl PoroelasticSample {
    /// 1/M = (α - φ)/K_m, zero in the incompressible-grain limit.
    pub fn inverse_biot_modulus(&self) -> f64 {
        if self.matrix_modulus.is_infinite() {
            0.0
        } else {
            (self.alpha - self.porosity) / self.matrix_modulus
        }
    }

    /// |α² - c0 (K - K_d)| / α².
    pub fn gassmann_residual(&self) -> f64 {
        (self.alpha * self.alpha - self.c0 * (self.bulk_modulus - self.drained_modulus)).abs() / (self.alpha * self.alpha)
    }

    /// Short stable digest used in error reports.
    pub fn digest(&self) -> String {
        format!(
            "mu={:.6e} lambda={:.6e} alpha={:.6} kappa={:.6e} c0={:.6e}",
            self.mu, self.lambda, self.alpha, self.kappa, self.c0
        )
    }
}

pub fn zimmerman_bound(phi: f64) -> f64 {
    3.0 * phi / (2.0 + phi)
}

/// Bulk modulus K = 2μ/d + λ and Poisson ratio ν = λ / (2(μ + λ)).
pub fn derived_moduli(mu: f64, lambda: f64, d: usize) -> (f64, f64) {
    (2.0 * mu / d as f64 + lambda, lambda / (2.0 * (mu + lambda)))
}

fn c0_quadratic(k: f64, kf: f64, phi: f64, alpha: f64) -> (f64, f64, f64) {
    (k, alpha + alpha * phi + phi * k / kf - phi, alpha * alpha * phi / kf)
}

/// Both roots `(c0⁻, c0⁺)` of the storage quadratic.
pub fn c0_roots(k: f64, kf: f64, phi: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(k > 0.0 && kf > 0.0) || !(phi > 0.0 && phi < 1.0) || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "c0 quadratic needs K, K_f > 0, 0 < phi < 1, 0 < alpha <= 1 (got {k}, {kf}, {phi}, {alpha})"
        )));
    }
    let (a, b, c) = c0_quadratic(k, kf, phi, alpha);
    let mut disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL * scale {
            return Err(Error::Internal(format!("negative c0 discriminant {disc:e}")));
        }
        disc = 0.0;
    }
    let q = 0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    Ok((r1.min(r2), r1.max(r2)))
}

/// The physical storage coefficient c0⁺, the larger root.
pub fn solve_c0(k: f64, kf: f64, phi: f64, alpha: f64) -> Result<f64> {
    let (_, c0) = c0_roots(k, kf, phi, alpha)?;
    let (a, b, c) = c0_quadratic(k, kf, phi, alpha);
    let residual = (a * c0 * c0 - b * c0 + c).abs() / (a * c0 * c0 + b.abs() * c0 + c);
    if residual > RESIDUAL_TOL {
        return Err(Error::Internal(format!("c0 residual {residual:e}")));
    }
    let lower = phi / kf;
    if c0 < lower * (1.0 - 1e-12) {
        return Err(Error::Internal(format!("c0 = {c0:e} below phi/K_f = {lower:e}")));
    }
    Ok(c0)
}

/// K_m = (K c0 - α²) / (c0 (1 - α)); infinite for α = 1.
pub fn gassmann_matrix_modulus(k: f64, c0: f64, alpha: f64) -> Result<f64> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidInput(format!("c0 must be positive, got {c0}")));
    }
    if alpha >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let num = k * c0 - alpha * alpha;
    if num <= 0.0 {
        return Err(Error::Inadmissible(format!(
            "K c0 = {:e} does not exceed alpha^2 = {:e}, K_m would be non-positive",
            k * c0,
            alpha * alpha
        )));
    }
    Ok(num / (c0 * (1.0 - alpha)))
}

/// c0 from its definition (α - φ)/K_m + φ/K_f.
pub fn c0_from_definition(km: f64, kf: f64, phi: f64, alpha: f64) -> f64 {
    let matrix = if km.is_infinite() { 0.0 } else { (alpha - phi) / km };
    matrix + phi / kf
}

/// Applies the model transforms to ξ and completes the sample.
pub fn sample_params(xi: &[f64], model: &UncertaintyModel) -> Result<PoroelasticSample> {
    if xi.len() != UncertaintyModel::DIM {
        return Err(Error::DimensionMismatch {
            expected: UncertaintyModel::DIM,
            got: xi.len(),
        });
    }
    let phi = model.porosity;
    let [mu, lambda, alpha, kappa] = [0, 1, 2, 3].map(|i| model.transforms()[i].apply(xi[i], phi));
    let amin = zimmerman_bound(phi);
    if alpha < amin * (1.0 - 1e-14) || alpha > 1.0 {
        return Err(Error::Inadmissible(format!("alpha = {alpha} outside [{amin}, 1]")));
    }
    let alpha = alpha.clamp(amin, 1.0);
    let (k, nu) = derived_moduli(mu, lambda, SPATIAL_DIM);
    let c0 = solve_c0(k, model.fluid_modulus, phi, alpha)?;
    let km = gassmann_matrix_modulus(k, c0, alpha)?;
    let kd = if km.is_infinite() { 0.0 } else { (1.0 - alpha) * km };
    Ok(PoroelasticSample {
        mu,
        lambda,
        alpha,
        kappa,
        porosity: phi,
        fluid_modulus: model.fluid_modulus,
        c0,
        bulk_modulus: k,
        matrix_modulus: km,
        drained_modulus: kd,
        poisson: nu,
    })
}

/// `count` samples from uniform ξ draws, deterministic in `seed`.
pub fn draw_samples(model: &UncertaintyModel, count: usize, seed: u64) -> Result<Vec<PoroelasticSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let xi: Vec<f64> = (0..UncertaintyModel::DIM).map(|_| rng.random_range(-1.0..=1.0)).collect();
            sample_params(&xi, model)
        })
        .collect()
}

/// Histogram CSV `bin_lo,bin_hi,count,density` over `[min, max]` of the values.
pub fn histogram_csv(values: &[f64], bins: usize) -> String {
    let mut out = String::from("bin_lo,bin_hi,count,density\n");
    if values.is_empty() || bins == 0 {
        return out;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    for (b, c) in counts.iter().enumerate() {
        let a = lo + b as f64 * width;
        let density = *c as f64 / (values.len() as f64 * width);
        out.push_str(&format!("{a:e},{:e},{c},{density:e}\n", a + width));
    }
    out
}
