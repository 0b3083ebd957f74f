//! Experiment configuration shared by every subcommand.
//!
//! Flags and JSON files fill the same struct. Defaults live in the clap
//! attributes only; `Default` parses an empty command line.

use crate::CliError;
use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Command {
    #[default]
    #[serde(rename = "pu classical")]
    PuClassical,
    #[serde(rename = "pu decouple-check")]
    PuDecoupleCheck,
    #[serde(rename = "pu x-growth")]
    PuXGrowth,
    #[serde(rename = "nonlocal modes")]
    NonlocalModes,
    #[serde(rename = "nonlocal residues")]
    NonlocalResidues,
    #[serde(rename = "nonlocal pf-check")]
    NonlocalPfCheck,
    #[serde(rename = "nonlocal trajectory")]
    NonlocalTrajectory,
    #[serde(rename = "nonlocal spectrum")]
    NonlocalSpectrum,
    #[serde(rename = "sf d-check")]
    SfDCheck,
    #[serde(rename = "sf eigenfunction")]
    SfEigenfunction,
    #[serde(rename = "propagator closed")]
    PropagatorClosed,
    #[serde(rename = "propagator trotter-converge")]
    PropagatorTrotterConverge,
    #[serde(rename = "propagator spectral-identity")]
    PropagatorSpectralIdentity,
    #[serde(rename = "propagator euclid-pitfall")]
    PropagatorEuclidPitfall,
    #[serde(rename = "lab evolve")]
    LabEvolve,
    #[serde(rename = "lab dilrot")]
    LabDilrot,
    #[serde(rename = "lab divergence-scan")]
    LabDivergenceScan,
    #[serde(rename = "lab commutator")]
    LabCommutator,
}

impl Command {
    pub const ALL: [Command; 18] = [
        Command::PuClassical,
        Command::PuDecoupleCheck,
        Command::PuXGrowth,
        Command::NonlocalModes,
        Command::NonlocalResidues,
        Command::NonlocalPfCheck,
        Command::NonlocalTrajectory,
        Command::NonlocalSpectrum,
        Command::SfDCheck,
        Command::SfEigenfunction,
        Command::PropagatorClosed,
        Command::PropagatorTrotterConverge,
        Command::PropagatorSpectralIdentity,
        Command::PropagatorEuclidPitfall,
        Command::LabEvolve,
        Command::LabDilrot,
        Command::LabDivergenceScan,
        Command::LabCommutator,
    ];

    /// `"group sub"`, as written in configs and artifact headers.
    pub fn name(self) -> &'static str {
        match self {
            Command::PuClassical => "pu classical",
            Command::PuDecoupleCheck => "pu decouple-check",
            Command::PuXGrowth => "pu x-growth",
            Command::NonlocalModes => "nonlocal modes",
            Command::NonlocalResidues => "nonlocal residues",
            Command::NonlocalPfCheck => "nonlocal pf-check",
            Command::NonlocalTrajectory => "nonlocal trajectory",
            Command::NonlocalSpectrum => "nonlocal spectrum",
            Command::SfDCheck => "sf d-check",
            Command::SfEigenfunction => "sf eigenfunction",
            Command::PropagatorClosed => "propagator closed",
            Command::PropagatorTrotterConverge => "propagator trotter-converge",
            Command::PropagatorSpectralIdentity => "propagator spectral-identity",
            Command::PropagatorEuclidPitfall => "propagator euclid-pitfall",
            Command::LabEvolve => "lab evolve",
            Command::LabDilrot => "lab dilrot",
            Command::LabDivergenceScan => "lab divergence-scan",
            Command::LabCommutator => "lab commutator",
        }
    }

    /// File stem for the artifacts, e.g. `lab-divergence-scan`.
    pub fn stem(self) -> String {
        self.name().replace(' ', "-")
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Inverted,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StencilChoice {
    Second,
    Eighth,
}

/// Every knob of every experiment. Each command reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(skip)]
    pub command: Command,

    // physics
    /// Ω of the PU oscillator, ω of the kernels and the nonlocal model
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// nonlocal delay T
    #[arg(long, default_value_t = 1.0)]
    pub delay: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// energy Ẽ for the spectral identity
    #[arg(long, alias = "E", default_value_t = 0.0)]
    pub energy: f64,

    // classical flow
    /// initial (q₁, q₂, π₁, π₂)
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [1.0, 0.0, 0.0, 0.0])]
    pub state: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// pass threshold of the command's check; each command has its own default
    #[arg(long)]
    pub tolerance: Option<f64>,

    // nonlocal modes
    #[arg(long, default_value_t = 32)]
    pub pairs: usize,
    #[arg(long, default_value_t = 40.0)]
    pub search_radius: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32, 64])]
    pub truncations: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub test_points: usize,
    /// index into the stored roots excited by `nonlocal trajectory`
    #[arg(long, default_value_t = 0)]
    pub mode: usize,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,

    // special functions
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
    pub order_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub order_im: f64,
    /// direction of the sampled ray in degrees
    #[arg(long, default_value_t = 45.0)]
    pub angle: f64,
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// oscillator level n
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    /// inverted-factor energy ε (ket of the divergence scan)
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub epsilon: f64,
    /// bra energy ε′ of the divergence scan
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.3)]
    pub epsilon_bra: f64,
    /// +1 or −1
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub branch: i32,

    // propagators
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.3)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.2)]
    pub y: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64, 128, 256, 512, 1024])]
    pub trotter_steps: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Potential::Inverted)]
    pub potential: Potential,
    #[arg(long, default_value_t = 0.2)]
    pub taper: f64,

    // grids
    /// grid half-width L
    #[arg(long, default_value_t = 30.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.3)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0, 40.0])]
    pub cutoffs: Vec<f64>,
    /// scan the damped control instead of X̂
    #[arg(long)]
    pub control_width: Option<f64>,
    #[arg(long, value_enum, default_value_t = StencilChoice::Eighth)]
    pub stencil: StencilChoice,

    /// artifact directory; falls back to $HDLAB_OUT, then `.`
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Parser)]
struct DefaultsOnly {
    #[command(flatten)]
    config: ExperimentConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        DefaultsOnly::parse_from(["hdlab"]).config
    }
}

pub const OUTPUT_ENV: &str = "HDLAB_OUT";

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("config JSON: {e}")))
    }

    /// Keys present in the file replace the flag values.
    pub fn overridden_by(&self, file: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(file)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
        let patch: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
        let Value::Object(patch) = patch else {
            return Err(CliError::Config(format!("{}: expected a JSON object", file.display())));
        };
        let mut base = serde_json::to_value(self).expect("config serializes");
        let obj = base.as_object_mut().expect("config is an object");
        for (k, v) in patch {
            obj.insert(k, v);
        }
        serde_json::from_value(base).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}
