use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use biot_uq::driver::{Overrides, Session};
use biot_uq::quadrature::SparseGrid;

/// Sparse pseudo-spectral projection campaigns for uncertain Biot problems.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print sparse-grid node counts (or the nodes of one level).
    Grid {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        max_level: usize,
        /// Print the nodes and weights of this level as CSV instead.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run a campaign: mode tables and statistic fields.
    Run(Common),
    /// Mean-squared error of the surrogate at Latin-hypercube points.
    Validate(Common),
    /// First- and total-order partial variances.
    Sense(Common),
    /// MSE norms over a range of grid levels.
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn session(&self) -> anyhow::Result<Session> {
        let o = Overrides {
            level: self.level,
            seed: self.seed,
            parallelism: self.parallelism,
            out: self.out.clone(),
        };
        Session::load(&self.config, &o).with_context(|| format!("loading {}", self.config.display()))
    }
}

const REPORTED: [(usize, usize); 2] = [(3, 209), (5, 2561)];

fn grid(dim: usize, max_level: usize, level: Option<usize>) -> anyhow::Result<()> {
    if let Some(l) = level {
        print!("{}", SparseGrid::new(dim, l)?.to_csv());
        return Ok(());
    }
    println!("N = {dim}, nested Clenshaw-Curtis, levels from 0, |i|_1 <= l");
    println!("{:>5} {:>8} {:>10} {:>9}", "level", "N_q", "|K(l)|", "reported");
    for l in 1..=max_level {
        let g = SparseGrid::new(dim, l)?;
        let reported = REPORTED
            .iter()
            .find(|(rl, _)| dim == 4 && *rl == l)
            .map_or(String::new(), |(_, n)| n.to_string());
        println!("{l:>5} {:>8} {:>10} {reported:>9}", g.n_nodes(), g.admissible_set().len());
    }
    if dim == 4 {
        println!(
            "note: the reported 209 (l=3) and 2561 (l=5) are not Clenshaw-Curtis counts; they equal\n      \
             a nested rule with 2^(i+1)-1 points per level (Fejer-2 / Gauss-Patterson growth).\n      \
             This grid uses n(0)=1, n(i)=2^i+1, so N_q differs by construction."
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Grid { dim, max_level, level } => grid(dim, max_level, level)?,
        Command::Run(c) => {
            let s = c.session()?;
            let (r, manifest) = s.run()?;
            println!(
                "level {} with {} nodes, {} modes; manifest {}",
                r.level,
                r.n_nodes,
                r.expansion.n_modes(),
                manifest.display()
            );
        }
        Command::Validate(c) => {
            let s = c.session()?;
            let (r, manifest) = s.validate()?;
            println!(
                "level {} ({} nodes), {} validation solves used, {} excluded",
                r.level, r.n_nodes, r.n_used, r.n_excluded
            );
            for (name, v) in &r.norms {
                println!("  ||MSE({name})|| = {v:e}");
            }
            println!("manifest {}", manifest.display());
        }
        Command::Sense(c) => {
            let s = c.session()?;
            let (r, manifest) = s.sense()?;
            let total: f64 = r.variance.iter().sum();
            for (i, (f, t)) in r.first.iter().zip(&r.total).enumerate() {
                let (fs, ts): (f64, f64) = (f.iter().sum(), t.iter().sum());
                println!(
                    "xi_{}: first {:.4} total {:.4} (share of summed variance of {})",
                    i + 1,
                    fs / total,
                    ts / total,
                    r.field
                );
            }
            println!("manifest {}", manifest.display());
        }
        Command::Convergence(c) => {
            let s = c.session()?;
            let (sweep, manifest) = s.convergence()?;
            print!("{}", sweep.to_csv());
            println!("manifest {}", manifest.display());
        }
    }
    Ok(())
}
