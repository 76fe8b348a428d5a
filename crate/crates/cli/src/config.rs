//! Experiment configuration: a versioned JSON file plus command-line overrides.

use std::path::PathBuf;

use mqs_core::amplifiers::{Gain, MeanPhotonFamily};
use mqs_core::ofilter::PfiltOn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::RunError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CoherentCurves,
    PcCurve,
    UniversalCurve,
    UniversalDistributions,
    LossSurface,
    OfilterCurves,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::CoherentCurves,
        Experiment::PcCurve,
        Experiment::UniversalCurve,
        Experiment::UniversalDistributions,
        Experiment::LossSurface,
        Experiment::OfilterCurves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CoherentCurves => "coherent-curves",
            Experiment::PcCurve => "pc-curve",
            Experiment::UniversalCurve => "universal-curve",
            Experiment::UniversalDistributions => "universal-distributions",
            Experiment::LossSurface => "loss-surface",
            Experiment::OfilterCurves => "ofilter-curves",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// What a `nbar` target refers to for this experiment.
    fn mean_photon_family(self) -> Option<MeanPhotonFamily> {
        match self {
            Experiment::CoherentCurves => None,
            Experiment::PcCurve => Some(MeanPhotonFamily::PhaseCovariant),
            Experiment::OfilterCurves => Some(MeanPhotonFamily::UniversalCloningMode),
            _ => Some(MeanPhotonFamily::Universal),
        }
    }
}

/// Loss rates `R`, given explicitly or as an inclusive linspace. In JSON a
/// bare array is accepted as a list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields, from = "GridRepr")]
pub enum Grid {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, num: usize },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum TaggedGrid {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, num: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Bare(Vec<f64>),
    Tagged(TaggedGrid),
}

impl From<GridRepr> for Grid {
    fn from(r: GridRepr) -> Self {
        match r {
            GridRepr::Bare(v) | GridRepr::Tagged(TaggedGrid::List(v)) => Grid::List(v),
            GridRepr::Tagged(TaggedGrid::Linspace { start, stop, num }) => Grid::Linspace { start, stop, num },
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Linspace { start, stop, num } => match num {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }

    /// `a,b,c` or `linspace:start:stop:num`.
    pub fn parse(text: &str) -> Result<Self, String> {
        if let Some(rest) = text.strip_prefix("linspace:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("expected linspace:start:stop:num, got {text}"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"));
            let count = parts[2].trim().parse::<usize>().map_err(|e| format!("{}: {e}", parts[2]))?;
            return Ok(Grid::Linspace { start: num(parts[0])?, stop: num(parts[1])?, num: count });
        }
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Grid::List)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<u32>>,
    #[serde(default)]
    pub pfilt_on: PfiltOn,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_jobs() -> usize {
    1
}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub g: Option<f64>,
    pub nbar: Option<f64>,
    pub cutoff: Option<usize>,
    pub grid: Option<Grid>,
    pub kappa: Option<Vec<u32>>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub pfilt_on: Option<PfiltOn>,
}

/// The physics-relevant part of a config, hashed into every output header.
#[derive(Serialize)]
struct Hashed<'a> {
    schema: u32,
    experiment: Experiment,
    g: Option<f64>,
    nbar: Option<f64>,
    cutoff: Option<usize>,
    grid: Option<&'a Grid>,
    kappa: Option<&'a Vec<u32>>,
    pfilt_on: PfiltOn,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(mut self, o: Overrides) -> Result<Self, RunError> {
        if o.g.is_some() && o.nbar.is_some() {
            return Err(RunError::Config("--g and --nbar are mutually exclusive".into()));
        }
        if let Some(g) = o.g {
            self.g = Some(g);
            self.nbar = None;
        }
        if let Some(n) = o.nbar {
            self.nbar = Some(n);
            self.g = None;
        }
        self.cutoff = o.cutoff.or(self.cutoff);
        self.grid = o.grid.or(self.grid);
        self.kappa = o.kappa.or(self.kappa);
        self.out = o.out.unwrap_or(self.out);
        self.jobs = o.jobs.unwrap_or(self.jobs);
        self.cache_dir = o.cache_dir.or(self.cache_dir);
        self.pfilt_on = o.pfilt_on.unwrap_or(self.pfilt_on);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.schema != SCHEMA {
            return bad(format!("unsupported schema {} (expected {SCHEMA})", self.schema));
        }
        match (self.g, self.nbar) {
            (Some(_), Some(_)) => return bad("give exactly one of g and nbar, not both".into()),
            (None, None) => return bad("one of g and nbar is required".into()),
            _ => {}
        }
        if let Some(g) = self.g {
            if self.experiment == Experiment::CoherentCurves {
                return bad("coherent-curves is parameterized by nbar = |alpha|^2".into());
            }
            if !(g.is_finite() && g >= 0.0) {
                return bad(format!("g = {g} must be finite and non-negative"));
            }
        }
        if let Some(n) = self.nbar {
            if !(n.is_finite() && n > 0.0) {
                return bad(format!("nbar = {n} must be positive"));
            }
        }
        if let Some(grid) = &self.grid {
            let pts = grid.points();
            if pts.is_empty() {
                return bad("grid is empty".into());
            }
            if let Some(r) = pts.iter().find(|r| !(0.0..=1.0).contains(*r)) {
                return bad(format!("loss rate {r} is outside [0, 1]"));
            }
        }
        if let Some(k) = &self.kappa {
            if k.is_empty() {
                return bad("kappa list is empty".into());
            }
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn gain(&self) -> Result<Gain, RunError> {
        match (self.g, self.nbar, self.experiment.mean_photon_family()) {
            (Some(g), _, _) => Gain::new(g).map_err(|e| RunError::Config(e.to_string())),
            (None, Some(n), Some(family)) => {
                Gain::from_mean_photon(n, family).map_err(|e| RunError::Config(e.to_string()))
            }
            _ => Err(RunError::Config(format!("{} has no gain", self.experiment.name()))),
        }
    }

    /// SHA-256 of the fields that determine the numbers, hex encoded.
    pub fn hash(&self) -> String {
        let h = Hashed {
            schema: self.schema,
            experiment: self.experiment,
            g: self.g,
            nbar: self.nbar,
            cutoff: self.cutoff,
            grid: self.grid.as_ref(),
            kappa: self.kappa.as_ref(),
            pfilt_on: self.pfilt_on,
        };
        let json = serde_json::to_string(&h).expect("plain data serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
