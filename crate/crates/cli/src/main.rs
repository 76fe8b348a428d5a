use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mqs_cli::{Config, Experiment, Grid, Overrides, RunError};
use mqs_core::ofilter::PfiltOn;

#[derive(Parser, Debug)]
#[command(name = "mqs", version, about = "Run a macroscopic-superposition loss experiment")]
struct Args {
    /// coherent-curves, pc-curve, universal-curve, universal-distributions,
    /// loss-surface or ofilter-curves
    experiment: String,
    /// JSON config with `schema: 1`
    #[arg(long)]
    config: PathBuf,
    /// Amplifier gain (replaces `nbar`)
    #[arg(long)]
    g: Option<f64>,
    /// Mean photon number, converted to a gain (replaces `g`)
    #[arg(long)]
    nbar: Option<f64>,
    /// Photon-number cutoff instead of the deficit-controlled default
    #[arg(long)]
    cutoff: Option<usize>,
    /// Loss rates: `a,b,c` or `linspace:start:stop:num`
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated filter thresholds
    #[arg(long, value_delimiter = ',')]
    kappa: Option<Vec<u32>>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for cached Kraus-route operators
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// State on which the filter success probability is evaluated
    #[arg(long, value_parser = ["lossless", "lossy"])]
    pfilt_on: Option<String>,
}

fn resolve(args: Args) -> Result<Config, RunError> {
    let experiment = Experiment::parse(&args.experiment)
        .ok_or_else(|| RunError::Config(format!("unknown experiment {}", args.experiment)))?;
    let cfg = Config::load(&args.config)?;
    if cfg.experiment != experiment {
        return Err(RunError::Config(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            experiment.name()
        )));
    }
    let grid = args.grid.as_deref().map(Grid::parse).transpose().map_err(RunError::Config)?;
    let pfilt_on = args.pfilt_on.map(|s| if s == "lossy" { PfiltOn::Lossy } else { PfiltOn::Lossless });
    cfg.apply(Overrides {
        g: args.g,
        nbar: args.nbar,
        cutoff: args.cutoff,
        grid,
        kappa: args.kappa,
        out: args.out,
        jobs: args.jobs,
        cache_dir: args.cache_dir,
        pfilt_on,
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = resolve(args).and_then(|cfg| mqs_cli::run(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mqs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
