//! Experiment configuration files.
//!
//! A run is described by one TOML file with an optional top-level `command`,
//! `seed` and `output_path`, plus a section named after the command. Unknown
//! keys are rejected everywhere.

use std::path::PathBuf;

use clap::ValueEnum;
use combsync_core::clockmodel::{ClockModel, CombParams};
use combsync_core::quantum::EstimatorModel;
use combsync_core::synclink::{BeamGeometry, LinkModel};
use combsync_core::{NoiseSpec, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Noise,
    Stability,
    Sync,
    QuantumScaling,
    Advantage,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Noise => "noise",
            Command::Stability => "stability",
            Command::Sync => "sync",
            Command::QuantumScaling => "quantum-scaling",
            Command::Advantage => "advantage",
        }
    }

    /// Section key holding this command's parameters.
    pub fn section(self) -> &'static str {
        match self {
            Command::QuantumScaling => "quantum_scaling",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub stability: Option<StabilitySection>,
    #[serde(default)]
    pub sync: Option<SyncSection>,
    #[serde(default)]
    pub quantum_scaling: Option<QuantumScalingSection>,
    #[serde(default)]
    pub advantage: Option<AdvantageSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub count: usize,
    pub tau0: f64,
    /// Summed noise processes.
    pub components: Vec<NoiseSpec>,
}

fn default_variant() -> Variant {
    Variant::Ffi1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    /// Sample spacing of the ȳ series, s.
    #[serde(default)]
    pub tau0: Option<f64>,
    /// Length of the synthesized series.
    #[serde(default)]
    pub count: Option<usize>,
    /// Noise processes to synthesize and sum.
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
    /// ȳ series file, resolved relative to the config file.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Averaging factors; octaves when absent.
    #[serde(default)]
    pub m_values: Option<Vec<usize>>,
    #[serde(default)]
    pub fit_tau_min: Option<f64>,
    #[serde(default)]
    pub fit_tau_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkPreset {
    /// Light-time delays in vacuum, lossless.
    #[default]
    Symmetric,
    /// Inter-satellite optical link with beam geometry and pointing loss.
    Leo,
}

/// A link preset at a distance, with optional per-field overrides.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    #[serde(default)]
    pub preset: LinkPreset,
    pub distance_km: f64,
    #[serde(default)]
    pub delay_ab: Option<f64>,
    #[serde(default)]
    pub delay_ba: Option<f64>,
    #[serde(default)]
    pub troposphere: Option<bool>,
    #[serde(default)]
    pub geometric: Option<BeamGeometry>,
    #[serde(default)]
    pub pointing_sigma: Option<f64>,
    #[serde(default)]
    pub eta_detector: Option<f64>,
    #[serde(default)]
    pub sigma_excess: Option<f64>,
}

impl LinkSection {
    pub fn at_distance(&self, distance_km: f64) -> LinkModel {
        let base = match self.preset {
            LinkPreset::Symmetric => LinkModel::symmetric(distance_km),
            LinkPreset::Leo => LinkModel::leo_inter_satellite(distance_km),
        };
        LinkModel {
            delay_ab: self.delay_ab.unwrap_or(base.delay_ab),
            delay_ba: self.delay_ba.unwrap_or(base.delay_ba),
            troposphere: self.troposphere.unwrap_or(base.troposphere),
            geometric: self.geometric.or(base.geometric),
            pointing_sigma: self.pointing_sigma.unwrap_or(base.pointing_sigma),
            eta_detector: self.eta_detector.unwrap_or(base.eta_detector),
            sigma_excess: self.sigma_excess.unwrap_or(base.sigma_excess),
            ..base
        }
    }

    pub fn build(&self) -> LinkModel {
        self.at_distance(self.distance_km)
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncSection {
    pub trials: usize,
    /// Time between exchanges, s.
    pub interval: f64,
    #[serde(default)]
    pub true_offset: f64,
    #[serde(default)]
    pub turnaround: f64,
    #[serde(default = "one")]
    pub sigma_scale: f64,
    #[serde(default)]
    pub tdev_factors: Option<Vec<usize>>,
    pub clock_a: ClockModel,
    pub clock_b: ClockModel,
    pub link: LinkSection,
    #[serde(default)]
    pub estimator: Option<EstimatorModel>,
    /// Comb whose mode ladder is tabulated alongside the campaign.
    #[serde(default)]
    pub comb: Option<CombParams>,
}

fn default_trials() -> usize {
    1000
}
fn default_n_min() -> f64 {
    10.0
}
fn default_n_max() -> f64 {
    1e6
}
fn default_points_per_decade() -> usize {
    4
}
fn default_r_min() -> f64 {
    2.0
}
fn default_r_max() -> f64 {
    8.0
}
fn default_r_points() -> usize {
    13
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumScalingSection {
    pub nu0: f64,
    pub t0: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_n_min")]
    pub n_min: f64,
    #[serde(default = "default_n_max")]
    pub n_max: f64,
    #[serde(default = "default_points_per_decade")]
    pub points_per_decade: usize,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_r_points")]
    pub r_points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageSection {
    pub estimator: EstimatorModel,
    pub link: LinkSection,
    /// Distances for the sweep table, km.
    #[serde(default)]
    pub sweep_km: Vec<f64>,
}
