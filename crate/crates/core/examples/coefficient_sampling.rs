//! Coefficient models: transform maps, closed-form moments, the storage
//! coefficient c0 and its empirical distribution.

use biot_uq::coefficients::{draw_samples, histogram_csv, sample_params, UncertaintyModel};

fn main() -> biot_uq::Result<()> {
    for (name, model) in [
        ("validation", UncertaintyModel::validation()),
        ("realistic", UncertaintyModel::realistic()),
    ] {
        println!("{name} model ({}):", model.units);
        for (label, t) in ["mu", "lambda", "alpha", "kappa"].iter().zip(model.transforms()) {
            let (m, v) = t.moments(model.porosity);
            println!("  {label:<7} mean {m:<12.6} c_v {:.3}", v.sqrt() / m);
        }
        let center = sample_params(&[0.0; 4], &model)?;
        println!("  at xi = 0: {}", center.digest());
    }

    let model = UncertaintyModel::validation();
    let samples = draw_samples(&model, 20_000, 1)?;
    let c0: Vec<f64> = samples.iter().map(|s| s.c0).collect();
    let (lo, hi) = c0.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let worst = samples.iter().map(|s| s.gassmann_residual()).fold(0.0, f64::max);
    println!("\nc0 over 20000 draws: [{lo:.3e}, {hi:.3e}] 1/kPa, max Gassmann residual {worst:.1e}");
    print!("{}", histogram_csv(&c0, 8));
    Ok(())
}
