//! TOML run configuration.
//!
//! ```toml
//! output_dir = "out"
//! cache = true
//!
//! [system]
//! e_c = 0.05
//! e_j = 1.6
//! g = 0.025
//! n_g = 0.0
//!
//! [labeling]
//! methods = ["continuity", "recursive", "overlap"]
//! ladders = ["g"]
//! delta = 0.01
//! n_max = 260
//!
//! [drive]
//! amplitude = 5e-3
//! omega_d = 1.0015
//! t_end = 3000.0
//! fock_cutoff_dyn = 150
//!
//! [sweep]
//! n_g = [0.0, 0.1, 0.2]
//! ladders = ["g", "e"]
//! [[sweep.delta_override]]
//! ladder = "g"
//! n_g = 0.1
//! delta = 0.015
//! ```
//!
//! Unset keys take their defaults; unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{DriveParams, Frame};
use crate::error::{Error, Result};
use crate::labeling::{ContinuityConfig, FirstStep, Method, DEFAULT_DELTA, DEFAULT_TRUNCATION_MARGIN};
use crate::observables::DetectorConfig;
use crate::operators::SystemSpec;

/// Qubit level that starts a ladder: `"g"`, `"e"`, `"f"` or a level index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLevel(pub usize);

impl QubitLevel {
    pub const GROUND: QubitLevel = QubitLevel(0);
    pub const EXCITED: QubitLevel = QubitLevel(1);
}

impl fmt::Display for QubitLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("g"),
            1 => f.write_str("e"),
            2 => f.write_str("f"),
            p => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for QubitLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(QubitLevel(0)),
            "e" => Ok(QubitLevel(1)),
            "f" => Ok(QubitLevel(2)),
            other => other
                .parse()
                .map(QubitLevel)
                .map_err(|_| Error::Config(format!("unknown qubit level `{other}`; use g, e, f or an index"))),
        }
    }
}

impl Serialize for QubitLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QubitLevel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingConfig {
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_ladders")]
    pub ladders: Vec<QubitLevel>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub first_step: FirstStep,
    #[serde(default = "default_margin")]
    pub truncation_margin: usize,
    #[serde(default = "default_threshold")]
    pub peak_threshold: f64,
    #[serde(default = "default_baseline_window")]
    pub baseline_window: usize,
    #[serde(default = "default_return_window")]
    pub return_window: usize,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Continuity, Method::Recursive, Method::Overlap]
}
fn default_ladders() -> Vec<QubitLevel> {
    vec![QubitLevel::GROUND]
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_n_max() -> usize {
    260
}
fn default_margin() -> usize {
    DEFAULT_TRUNCATION_MARGIN
}
fn default_threshold() -> f64 {
    DetectorConfig::default().threshold
}
fn default_baseline_window() -> usize {
    DetectorConfig::default().baseline_window
}
fn default_return_window() -> usize {
    DetectorConfig::default().return_window
}

impl Default for LabelingConfig {
    fn default() -> Self {
        Self {
            methods: default_methods(),
            ladders: default_ladders(),
            delta: default_delta(),
            n_max: default_n_max(),
            first_step: FirstStep::default(),
            truncation_margin: default_margin(),
            peak_threshold: default_threshold(),
            baseline_window: default_baseline_window(),
            return_window: default_return_window(),
        }
    }
}

impl LabelingConfig {
    pub fn continuity(&self, delta: f64) -> ContinuityConfig {
        ContinuityConfig::new(delta, self.n_max)
            .with_first_step(self.first_step)
            .with_margin(self.truncation_margin)
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            threshold: self.peak_threshold,
            baseline_window: self.baseline_window,
            return_window: self.return_window,
        }
    }
}

/// Drive plus the frame and initial ladder state of a dynamics run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub amplitude: f64,
    pub omega_d: f64,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub fock_cutoff_dyn: usize,
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_photons: Option<f64>,
    #[serde(default = "default_ceiling_limit")]
    pub ceiling_limit: f64,
    #[serde(default = "default_frame")]
    pub frame: Frame,
    #[serde(default = "default_initial")]
    pub initial: QubitLevel,
    /// Photon interval for ladder comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_range: Option<[f64; 2]>,
}

impl DriveConfig {
    pub fn params(&self) -> DriveParams {
        DriveParams {
            amplitude: self.amplitude,
            omega_d: self.omega_d,
            t_end: self.t_end,
            dt: self.dt,
            fock_cutoff_dyn: self.fock_cutoff_dyn,
            sample_every: self.sample_every,
            stop_photons: self.stop_photons,
            ceiling_limit: self.ceiling_limit,
        }
    }
}

fn default_dt() -> f64 {
    DriveParams::new(0.0, 0.0, 0.0, 0).dt
}
fn default_sample_every() -> f64 {
    DriveParams::new(0.0, 0.0, 0.0, 0).sample_every
}
fn default_ceiling_limit() -> f64 {
    crate::dynamics::DEFAULT_CEILING_LIMIT
}
fn default_frame() -> Frame {
    Frame::Displaced
}
fn default_initial() -> QubitLevel {
    QubitLevel::GROUND
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaOverride {
    pub ladder: QubitLevel,
    pub n_g: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub n_g: Vec<f64>,
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub ladders: Vec<QubitLevel>,
    #[serde(default)]
    pub delta_override: Vec<DeltaOverride>,
}

impl SweepConfig {
    /// Window for `(ladder, n_g)`: an override if one matches, else `fallback`.
    pub fn delta_for(&self, ladder: QubitLevel, n_g: f64, fallback: f64) -> f64 {
        self.delta_override
            .iter()
            .find(|o| o.ladder == ladder && (o.n_g - n_g).abs() < 1e-12)
            .map_or(fallback, |o| o.delta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_cache")]
    pub cache: bool,
    pub system: SystemSpec,
    #[serde(default)]
    pub labeling: LabelingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_cache() -> bool {
    true
}

impl RunConfig {
    pub fn new(system: SystemSpec) -> Self {
        Self {
            output_dir: default_output_dir(),
            cache: default_cache(),
            system,
            labeling: LabelingConfig::default(),
            drive: None,
            sweep: None,
        }
    }

    /// Checks every invariant, naming the offending key.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, &'static str, String)> {
        let fail = |section, key, msg: String| Err((section, key, msg));
        if let Err(e) = self.system.validate() {
            let key = match &e {
                Error::InvalidSpec { field, .. } => *field,
                _ => "",
            };
            return fail("system", key, e.to_string());
        }
        let l = &self.labeling;
        if l.methods.is_empty() {
            return fail("labeling", "methods", "at least one method is required".into());
        }
        if l.ladders.is_empty() {
            return fail("labeling", "ladders", "at least one ladder is required".into());
        }
        if let Some(p) = l.ladders.iter().find(|p| p.0 >= self.system.charge_dim()) {
            return fail("labeling", "ladders", format!("qubit level {p} is outside the basis"));
        }
        if let Err(e) = l.continuity(l.delta).validate(self.system.fock_cutoff) {
            let key = if matches!(e, Error::TruncationMargin { .. }) { "n_max" } else { "delta" };
            return fail("labeling", key, e.to_string());
        }
        if !(l.peak_threshold > 0.0) {
            return fail("labeling", "peak_threshold", "must be > 0".into());
        }
        if l.baseline_window < 3 || l.return_window < 1 {
            return fail("labeling", "baseline_window", "windows must be >= 3 and >= 1".into());
        }
        if let Some(d) = &self.drive {
            if let Err(e) = d.params().validate() {
                let key = match &e {
                    Error::InvalidDrive { field, .. } => *field,
                    _ => "",
                };
                return fail("drive", key, e.to_string());
            }
            if let Some([lo, hi]) = d.compare_range {
                if !(lo <= hi) {
                    return fail("drive", "compare_range", "lower end exceeds upper end".into());
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.n_g.is_empty() && s.delta.is_empty() {
                return fail("sweep", "n_g", "a sweep needs a non-empty n_g or delta grid".into());
            }
            if s.n_g.iter().any(|x| !x.is_finite()) {
                return fail("sweep", "n_g", "grid values must be finite".into());
            }
            if s.delta.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
                return fail("sweep", "delta", "grid values must be finite and > 0".into());
            }
            if s.delta_override.iter().any(|o| !(o.delta > 0.0)) {
                return fail("sweep", "delta_override", "override windows must be > 0".into());
            }
        }
        Ok(())
    }

    /// Ladders swept, falling back to the labeling section.
    pub fn sweep_ladders(&self) -> Vec<QubitLevel> {
        match &self.sweep {
            Some(s) if !s.ladders.is_empty() => s.ladders.clone(),
            _ => self.labeling.ladders.clone(),
        }
    }
}

/// Parses and validates a configuration. Errors carry the line of the
/// offending key where it can be located.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(text, s.start));
        let msg = e.message().to_string();
        Error::Config(match line {
            Some(l) => format!("line {l}: {msg}"),
            None => msg,
        })
    })?;
    cfg.validate().map_err(|(section, key, msg)| {
        Error::Config(match find_key_line(text, section, key) {
            Some(l) => format!("line {l}: [{section}] {key}: {msg}"),
            None => format!("[{section}] {key}: {msg}"),
        })
    })?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn find_key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut section_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section {
                section_line = Some(i + 1);
            }
            continue;
        }
        let in_section = current == section || current.starts_with(&format!("{section}."));
        if in_section && !key.is_empty() {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    section_line
}
