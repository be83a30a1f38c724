//! Experiment configuration. Every optional field is resolved to a concrete value before
//! the run so the manifest can echo a config that reproduces it.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qprobe_core::correlations::MapQuantity;
use qprobe_core::models::Statistics;
use qprobe_core::reconstruct::WindowConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Spectrum,
    Sweep,
    Reconstruct,
    Correlations,
    Bloch,
    Lindblad,
    Validate,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when given.
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub probe: ProbeBlock,
    #[serde(default)]
    pub noise: NoiseBlock,
    #[serde(default)]
    pub correlations: CorrelationsBlock,
    #[serde(default)]
    pub bloch: BlochBlock,
    #[serde(default)]
    pub lindblad: LindbladBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Kitaev(KitaevBlock),
    BoseHubbard(BoseHubbardBlock),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KitaevBlock {
    pub sites: usize,
    /// `J` in units of the pairing.
    pub hopping: f64,
    #[serde(default = "one")]
    pub pairing: f64,
    pub range_exponent: f64,
    /// Defaults to 0.02 for spectroscopy tasks (every mode visible) and 0.5 otherwise.
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoseHubbardBlock {
    pub sites: usize,
    #[serde(default = "one")]
    pub hopping: f64,
    pub interaction: f64,
    #[serde(default = "one")]
    pub filling: f64,
    /// Defaults to `βJ = 1`.
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeBlock {
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    /// Measurement time; `time_factor · t_min` when absent.
    #[serde(default)]
    pub time: Option<f64>,
    #[serde(default = "default_time_factor")]
    pub time_factor: f64,
    #[serde(default)]
    pub window: WindowConvention,
    /// `|J_i/J_0|²` for the displaced positions; `[1]` on the chain, `[0.6, 0.35]` on the square lattice.
    #[serde(default)]
    pub ratios: Option<Vec<f64>>,
    #[serde(default)]
    pub elastic_overlap: f64,
    /// Frequency sweep; all three or none (automatic band coverage at step `2π/(5t)`).
    #[serde(default)]
    pub nu_min: Option<f64>,
    #[serde(default)]
    pub nu_max: Option<f64>,
    #[serde(default)]
    pub nu_step: Option<f64>,
    /// Peak detection threshold relative to the tallest peak.
    #[serde(default)]
    pub detect_threshold: Option<f64>,
}

impl Default for ProbeBlock {
    fn default() -> Self {
        Self {
            coupling: default_coupling(),
            time: None,
            time_factor: default_time_factor(),
            window: WindowConvention::default(),
            ratios: None,
            elastic_overlap: 0.0,
            nu_min: None,
            nu_max: None,
            nu_step: None,
            detect_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    /// Relative amplitude error ε (multiplicative, uniform in `[-ε, ε]`).
    #[serde(default)]
    pub relative_error: f64,
    /// Number of noise realisations; run `i` is seeded `seed + i·d` on a `d`-dimensional lattice.
    #[serde(default = "one_usize")]
    pub seeds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationLayout {
    /// `(r, 0)` for `r = 1..=max_separation`.
    Axis,
    /// Every `(rx, ry) ≠ 0` with `|rx|, |ry| ≤ max_separation` (square lattice only).
    Plane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationsBlock {
    #[serde(default = "default_quantity")]
    pub quantity: MapQuantity,
    #[serde(default = "default_layout")]
    pub layout: SeparationLayout,
    /// Defaults to `⌊N/2⌋ - 3`, short of where the two fronts around the ring meet.
    #[serde(default)]
    pub max_separation: Option<i64>,
    /// Explicit times; otherwise `0, t_step, ..., t_max`.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_t_step")]
    pub t_step: f64,
    #[serde(default)]
    pub normalize: bool,
    /// Fraction of the global maximum that marks a front arrival.
    #[serde(default = "default_arrival")]
    pub arrival_fraction: f64,
}

impl Default for CorrelationsBlock {
    fn default() -> Self {
        Self {
            quantity: default_quantity(),
            layout: default_layout(),
            max_separation: None,
            times: None,
            t_max: default_t_max(),
            t_step: default_t_step(),
            normalize: false,
            arrival_fraction: default_arrival(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochBlock {
    /// Samples per lattice period.
    #[serde(default = "default_bloch_samples")]
    pub samples: usize,
    /// Gaussian width of the synthetic Wannier function, units of `a`.
    #[serde(default = "default_wannier_width")]
    pub wannier_width: f64,
    /// Probe ground-state width, units of `a`.
    #[serde(default = "default_probe_width")]
    pub probe_width: f64,
}

impl Default for BlochBlock {
    fn default() -> Self {
        Self { samples: default_bloch_samples(), wannier_width: default_wannier_width(), probe_width: default_probe_width() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladBlock {
    /// Coupling weight `w = 2π g² |A|² ρ`.
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default = "one")]
    pub occupation: f64,
    #[serde(default = "default_statistics")]
    pub statistics: Statistics,
    /// End of the record; `5/γ` when absent.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_lindblad_samples")]
    pub samples: usize,
    /// Additive noise on the recorded population, as a fraction of the stationary value.
    #[serde(default)]
    pub noise: f64,
}

impl Default for LindbladBlock {
    fn default() -> Self {
        Self {
            weight: default_weight(),
            occupation: 1.0,
            statistics: default_statistics(),
            t_max: None,
            samples: default_lindblad_samples(),
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub plot: PlotKind,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats(), plot: PlotKind::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Line plot for curves, heat map for maps.
    #[default]
    Auto,
    Line,
    Heat,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_coupling() -> f64 {
    1e-6
}
fn default_time_factor() -> f64 {
    1.25
}
fn default_quantity() -> MapQuantity {
    MapQuantity::ConnectedCorrelation
}
fn default_layout() -> SeparationLayout {
    SeparationLayout::Axis
}
fn default_t_max() -> f64 {
    4.0
}
fn default_t_step() -> f64 {
    0.005
}
fn default_arrival() -> f64 {
    0.1
}
fn default_bloch_samples() -> usize {
    64
}
fn default_wannier_width() -> f64 {
    0.2
}
fn default_probe_width() -> f64 {
    0.1
}
fn default_weight() -> f64 {
    0.3
}
fn default_statistics() -> Statistics {
    Statistics::Bosonic
}
fn default_lindblad_samples() -> usize {
    101
}
fn default_directory() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
