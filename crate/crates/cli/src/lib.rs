//! Experiment runner: reads a config, evaluates one experiment and writes
//! CSV tables and SVG plots.

pub mod cache;
pub mod config;
pub mod experiments;
pub mod svg;
pub mod table;

use std::fs;
use std::path::PathBuf;

pub use config::{Config, Experiment, Grid, Overrides};
pub use experiments::Output;

/// Largest truncation deficit tolerated in any written result.
pub const DEFICIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical integrity error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<mqs_core::Error> for RunError {
    fn from(e: mqs_core::Error) -> Self {
        use mqs_core::Error as E;
        match e {
            E::ClippedMass { .. }
            | E::TraceMismatch { .. }
            | E::NotHermitian { .. }
            | E::LabelNotConserved { .. }
            | E::Hyp2F1NonConvergence { .. }
            | E::Hyp2F1Pole { .. }
            | E::FilteredToNothing { .. } => RunError::Numerical(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

/// `# key: value` lines every CSV starts with.
pub fn header(cfg: &Config, out: &Output) -> Vec<(String, String)> {
    vec![
        ("experiment".into(), cfg.experiment.name().into()),
        ("config_hash".into(), cfg.hash()),
        ("cutoff".into(), out.cutoff.to_string()),
        ("max_trace_deficit".into(), format!("{:e}", out.max_trace_deficit)),
    ]
}

/// Runs the experiment and returns the rendered files without writing them.
pub fn render(cfg: &Config) -> Result<Vec<(String, String)>, RunError> {
    let out = experiments::run(cfg)?;
    if !(out.max_trace_deficit <= DEFICIT_TOLERANCE) {
        return Err(RunError::Numerical(format!(
            "truncation deficit {:e} exceeds {DEFICIT_TOLERANCE:e}; raise the cutoff",
            out.max_trace_deficit
        )));
    }
    let head = header(cfg, &out);
    let mut files: Vec<(String, String)> =
        out.tables.iter().map(|t| (format!("{}.csv", t.name), t.to_csv(&head))).collect();
    files.extend(out.plots.into_iter().map(|(name, svg)| (format!("{name}.svg"), svg)));
    Ok(files)
}

/// Runs the experiment and writes its files under `cfg.out`.
pub fn run(cfg: &Config) -> Result<Vec<PathBuf>, RunError> {
    let files = render(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| RunError::Io(format!("{}: {e}", cfg.out.display())))?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = cfg.out.join(name);
        fs::write(&path, content).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
