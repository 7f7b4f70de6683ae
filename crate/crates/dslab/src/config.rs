use std::path::PathBuf;

use clap::ValueEnum;
use dslab_core::fv::FvConfig;
use dslab_core::profile::ProfileConfig;
use dslab_core::riemann::RiemannProblem;
use dslab_core::test_function::SpaceTimeTestFunction;
use dslab_core::vanishing::SweepConfig;
use dslab_core::weak::Quadrature;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Trajectory,
    Profile,
    Sweep,
    Fv,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Trajectory => "trajectory",
            Command::Profile => "profile",
            Command::Sweep => "sweep",
            Command::Fv => "fv",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Grid in time for the `solve` residual summary and `trajectory` output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_t_end() -> f64 {
    10.0
}

fn default_samples() -> usize {
    200
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            samples: default_samples(),
        }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(format!("times.t_end must be positive (got {})", self.t_end));
        }
        if self.samples < 2 {
            return Err(format!("times.samples must be at least 2 (got {})", self.samples));
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(move |i| self.t_end * i as f64 / last)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvCommand {
    pub simulation: FvConfig<f64>,
    /// Half-width of the measurement window around the density peak.
    #[serde(default = "default_window")]
    pub window_halfwidth: f64,
}

fn default_window() -> f64 {
    0.25
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Explicit test functions; when absent a seeded random family is used.
    #[serde(default)]
    pub test_functions: Option<Vec<SpaceTimeTestFunction<f64>>>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: Quadrature,
    /// Trajectory speed factor of the comparison solution.
    #[serde(default = "default_factor")]
    pub perturbation: f64,
}

fn default_count() -> usize {
    5
}

fn default_factor() -> f64 {
    1.1
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            test_functions: None,
            count: default_count(),
            seed: 0,
            quadrature: Quadrature::default(),
            perturbation: default_factor(),
        }
    }
}

/// A whole run as one JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub problem: RiemannProblem<f64>,
    #[serde(default)]
    pub times: Option<TimeGrid>,
    #[serde(default)]
    pub profile: Option<ProfileConfig<f64>>,
    #[serde(default)]
    pub sweep: Option<SweepConfig<f64>>,
    #[serde(default)]
    pub fv: Option<FvCommand>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}
