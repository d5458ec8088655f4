//! The config-driven pipeline behind the command line: load a TOML campaign,
//! run, validate and write a manifest with artifact digests.

use std::path::Path;

use biot_uq::driver::{CampaignConfig, Session};

const CONFIG: &str = r#"
model = "validation"
level = 2
seed = 11
validation_samples = 40
convergence_levels = [1, 2, 3]

[scenario]
preset = "injection"
cells = 8
"#;

fn main() -> biot_uq::Result<()> {
    let mut config = CampaignConfig::from_toml(CONFIG)?;
    config.out = Some(std::env::temp_dir().join("biot-uq-pipeline"));
    let session = Session::from_config(config, Path::new("."))?;

    let (r, manifest) = session.run()?;
    println!("run: {} nodes -> {}", r.n_nodes, manifest.display());
    let (v, _) = session.validate()?;
    println!("validate: {:?}", v.norms);
    let (sweep, manifest) = session.convergence()?;
    print!("{}", sweep.to_csv());
    println!("manifest {}", manifest.display());
    Ok(())
}
