use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use friedrichs::harness::{run_convergence, run_induction, run_verify};
use friedrichs::StudyConfig;

#[derive(Parser)]
#[command(name = "friedrichs", version, about = "Hybrid polytopal discretization of Friedrichs systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study.
    Convergence(Common),
    /// Identity suite and solve checks on small meshes.
    Verify(Common),
    /// Rotating-cylinder induction benchmark.
    Induction {
        #[command(flatten)]
        common: Common,
        /// Magnetic Reynolds numbers, comma separated.
        #[arg(long)]
        rm: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        sigma_mu: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// cart, tet, voro, or a comma-separated list of mesh files.
    #[arg(long)]
    mesh_family: Option<String>,
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    refinements: Option<String>,
    /// paper or upwind.
    #[arg(long)]
    stabilizer: Option<String>,
    /// auto, direct or bicgstab.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self, base: StudyConfig) -> Result<StudyConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                let mut c = base;
                c.merge_text(&text)?;
                c
            }
            None => base,
        };
        let pairs = [
            ("model", self.model.clone()),
            ("mesh-family", self.mesh_family.clone()),
            ("degrees", self.degrees.clone()),
            ("refinements", self.refinements.clone()),
            ("stabilizer", self.stabilizer.clone()),
            ("solver", self.solver.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Convergence(c) => {
            let cfg = c.config(StudyConfig::default())?;
            let study = run_convergence(&cfg)?;
            print!("{}", study.report());
            Ok(study.records.iter().all(|r| r.outcome.is_ok()))
        }
        Command::Verify(c) => {
            let base = StudyConfig {
                mesh_family: "cart".parse()?,
                refinements: vec![2],
                degrees: vec![0, 1, 2],
                ..StudyConfig::default()
            };
            let cfg = c.config(base)?;
            let report = run_verify(&cfg, cfg.seed)?;
            print!("{}", report.report());
            Ok(report.passed())
        }
        Command::Induction {
            common,
            rm,
            radius,
            lambda,
            sigma_mu,
        } => {
            let base = StudyConfig {
                model: "induction".parse()?,
                degrees: vec![0],
                refinements: vec![8],
                ..StudyConfig::default()
            };
            let mut cfg = common.config(base)?;
            cfg.model = "induction".parse()?;
            if let Some(v) = rm {
                cfg.set("rm", &v)?;
            }
            if let Some(v) = radius {
                cfg.radius = v;
            }
            if let Some(v) = lambda {
                cfg.lambda = v;
            }
            if let Some(v) = sigma_mu {
                cfg.sigma_mu = v;
            }
            let study = run_induction(&cfg)?;
            print!("{}", study.report());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
