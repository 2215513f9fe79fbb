use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Nonlinearity;

/// Commands understood by [`super::run`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Propagate,
    Solve,
    Stft,
    Modnorm,
    Wigner,
    GaborMatrix,
    Seminorm,
    DecayFit,
    Verify,
    TimeSearch,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Propagate,
        Command::Solve,
        Command::Stft,
        Command::Modnorm,
        Command::Wigner,
        Command::GaborMatrix,
        Command::Seminorm,
        Command::DecayFit,
        Command::Verify,
        Command::TimeSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Propagate => "propagate",
            Command::Solve => "solve",
            Command::Stft => "stft",
            Command::Modnorm => "modnorm",
            Command::Wigner => "wigner",
            Command::GaborMatrix => "gabor-matrix",
            Command::Seminorm => "seminorm",
            Command::DecayFit => "decay-fit",
            Command::Verify => "verify",
            Command::TimeSearch => "time-search",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Schema(format!("unknown command '{name}'")))
    }
}

/// One invocation: command, its parameters, where to write and the seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> serde_json::Value {
    serde_json::json!({})
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, params: empty_object(), output_dir: default_out(), seed: 0 }
    }

    /// Reads either a full `RunConfig` or a bare parameter object.
    pub fn load(path: &Path, command: Option<Command>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        if value.get("command").is_some() {
            let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
            if let Some(c) = command {
                if c != cfg.command {
                    return Err(Error::Schema(format!(
                        "config is for '{}' but '{}' was requested",
                        cfg.command.name(),
                        c.name()
                    )));
                }
            }
            Ok(cfg)
        } else {
            let command = command.ok_or_else(|| Error::Schema("no command given".into()))?;
            Ok(RunConfig { params: value, ..RunConfig::new(command) })
        }
    }

    /// Sets `params[key] = value`, used for flag overrides.
    pub fn set_param(&mut self, key: &str, value: serde_json::Value) -> Result<()> {
        match self.params.as_object_mut() {
            Some(map) => {
                map.insert(key.to_string(), value);
                Ok(())
            }
            None => Err(Error::Schema("params must be a JSON object".into())),
        }
    }

    pub fn params_as<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone())
            .map_err(|e| Error::Schema(format!("{} params: {e}", self.command.name())))
    }
}

/// Initial data: a preset name (`gauss`, `hermite:k`, `chirp`) or a file
/// (grid CSV or coefficient JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    Preset(String),
    File { file: PathBuf },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Preset("gauss".into())
    }
}

fn d_one() -> usize {
    1
}
fn default_k() -> u32 {
    32
}
fn default_l() -> f64 {
    12.0
}
fn default_n() -> usize {
    256
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_step() -> f64 {
    crate::tf::DEFAULT_STEP
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateParams {
    #[serde(default = "d_one")]
    pub d: usize,
    #[serde(rename = "K", default = "default_k")]
    pub k: u32,
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default = "one")]
    pub amplitude: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveParams {
    #[serde(default = "d_one")]
    pub d: usize,
    #[serde(rename = "K", default = "default_k")]
    pub k: u32,
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(rename = "T", default = "tenth")]
    pub horizon: f64,
    #[serde(rename = "M", default = "default_m")]
    pub steps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "Nonlinearity::dissipative_cubic")]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Weight exponent for the `M^{1,1}_s` diagnostics column.
    #[serde(default)]
    pub s: f64,
}

fn tenth() -> f64 {
    0.1
}
fn default_m() -> usize {
    64
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    30
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftParams {
    #[serde(default = "d_one")]
    pub d: usize,
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_step")]
    pub a: f64,
    #[serde(default = "default_step")]
    pub b: f64,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Also reconstruct and report the round-trip error.
    #[serde(default)]
    pub invert: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModnormParams {
    #[serde(default = "d_one")]
    pub d: usize,
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_step")]
    pub a: f64,
    #[serde(default = "default_step")]
    pub b: f64,
    #[serde(default = "two_str")]
    pub p: String,
    #[serde(default = "two_str")]
    pub q: String,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "default_weight")]
    pub weight: crate::tf::WeightKind,
    #[serde(default)]
    pub initial_data: InitialData,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn two_str() -> String {
    "2".into()
}
fn default_weight() -> crate::tf::WeightKind {
    crate::tf::WeightKind::Frequency
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerParams {
    #[serde(rename = "L", default = "wigner_l")]
    pub l: f64,
    #[serde(default = "wigner_n")]
    pub n: usize,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default)]
    pub f: InitialData,
    /// Second argument; defaults to `f`.
    #[serde(default)]
    pub g: Option<InitialData>,
}

fn wigner_l() -> f64 {
    8.0
}
fn wigner_n() -> usize {
    256
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaborParams {
    #[serde(rename = "L", default = "default_l")]
    pub l: f64,
    #[serde(default = "gabor_n")]
    pub n: usize,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default = "gauss_str")]
    pub symbol: String,
    /// Number of ray directions.
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Half-width and spacing of the square lattice of base points `z`.
    #[serde(default = "one")]
    pub z_half_width: f64,
    #[serde(default = "one")]
    pub z_step: f64,
    /// Decay-bound order; defaults to the symbol's order.
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(rename = "N", default = "default_order")]
    pub order: u32,
    #[serde(default = "yes")]
    pub identity: bool,
}

fn gabor_n() -> usize {
    576
}
fn gauss_str() -> String {
    "gauss".into()
}
fn default_rays() -> usize {
    8
}
fn default_radii() -> Vec<f64> {
    crate::quant::RaySampling::DEFAULT_RADII.to_vec()
}
fn default_order() -> u32 {
    1
}
fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Hormander,
    Shubin,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormParams {
    #[serde(default = "gauss_str")]
    pub symbol: String,
    #[serde(default = "hormander")]
    pub kind: SeminormKind,
    /// Derivative order `N` (Hörmander) or `k` (Shubin).
    #[serde(rename = "N", default = "default_order")]
    pub order: u32,
    /// Hörmander order `m`; defaults to the symbol's order.
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default = "box_r")]
    pub half_width: f64,
    #[serde(default = "box_points")]
    pub points: usize,
    #[serde(default = "box_step")]
    pub step: f64,
    /// Optional ellipticity check `a(z) ≥ C⟨z⟩` on `|z| ≥ R`.
    #[serde(default)]
    pub ellipticity: Option<EllipticityParams>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticityParams {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

fn hormander() -> SeminormKind {
    SeminormKind::Hormander
}
fn box_r() -> f64 {
    4.0
}
fn box_points() -> usize {
    33
}
fn box_step() -> f64 {
    0.0625
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayFitParams {
    /// Sweep CSV written by `gabor-matrix`.
    pub input: PathBuf,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default)]
    pub m: f64,
    #[serde(rename = "N", default = "default_order")]
    pub order: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub suite: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSearchParams {
    #[serde(default = "d_one")]
    pub d: usize,
    #[serde(rename = "K", default = "search_k")]
    pub k: u32,
    #[serde(rename = "L", default = "search_l")]
    pub l: f64,
    #[serde(default = "search_n")]
    pub n: usize,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "Nonlinearity::dissipative_cubic")]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "ground")]
    pub initial_data: InitialData,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub options: crate::evolution::SearchOptions,
}

fn search_k() -> u32 {
    16
}
fn search_l() -> f64 {
    10.0
}
fn search_n() -> usize {
    128
}
fn ground() -> InitialData {
    InitialData::Preset("hermite:0".into())
}
