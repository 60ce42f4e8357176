//! Shared domain types: embeddings, per-transition dynamics, detector
//! configuration, the bounded signal window, and the events a session emits.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, DetectError};
use crate::periodicity::PeriodEstimate;

/// One reasoning step's latent vector, widened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    step_index: usize,
    values: Vec<f64>,
}

impl Embedding {
    /// Validates that the vector is non-empty and finite.
    pub fn new(step_index: usize, values: Vec<f64>) -> Result<Self, DetectError> {
        if values.is_empty() {
            return Err(DetectError::EmptyEmbedding);
        }
        if let Some(component) = values.iter().position(|v| !v.is_finite()) {
            return Err(DetectError::NonFiniteInput { component });
        }
        Ok(Self { step_index, values })
    }

    pub fn from_f32(step_index: usize, values: &[f32]) -> Result<Self, DetectError> {
        Self::new(step_index, values.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Geometric diagnostics for the transition from step `transition_index` to
/// the next step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSample {
    pub transition_index: usize,
    /// L2 distance between consecutive embeddings.
    pub delta_mag: f64,
    /// Cosine similarity, clamped to `[-1, 1]`.
    pub cos_ang: f64,
    /// Composite signal `delta_mag * (1 - cos_ang)`.
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitMode {
    /// Promote the first cycle entry to `early_exit` and stop the session.
    #[serde(alias = "one-shot")]
    OneShot,
    /// Annotate cycle entries and exits without terminating.
    Monitor,
}

impl fmt::Display for ExitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitMode::OneShot => "one_shot",
            ExitMode::Monitor => "monitor",
        })
    }
}

impl FromStr for ExitMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one_shot" | "one-shot" => Ok(ExitMode::OneShot),
            "monitor" => Ok(ExitMode::Monitor),
            other => Err(ConfigError::UnknownExitMode(other.to_string())),
        }
    }
}

/// Detector hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Correlation threshold a period estimate must reach to count toward a cycle.
    pub rho_star: f64,
    /// Largest candidate lag.
    pub p_max: usize,
    /// Number of composite-signal samples held in the sliding window.
    pub window: usize,
    /// Consecutive qualifying estimates required to enter the cycle state.
    pub stability: usize,
    pub exit_mode: ExitMode,
    /// Require identical lags (instead of a +/-1 band) while accumulating
    /// entry stability. Off by default.
    #[serde(default)]
    pub exact_lag_entry: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            rho_star: 0.7,
            p_max: 8,
            window: 32,
            stability: 8,
            exit_mode: ExitMode::OneShot,
            exact_lag_entry: false,
        }
    }
}

impl DetectorConfig {
    /// Checks every structural constraint, reporting the first violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.p_max == 0 {
            return Err(ConfigError::ZeroMaxPeriod);
        }
        if self.window < self.p_max + 2 {
            return Err(ConfigError::WindowTooSmall {
                window: self.window,
                p_max: self.p_max,
            });
        }
        if !(self.rho_star > 0.0 && self.rho_star <= 1.0) {
            return Err(ConfigError::BadThreshold(self.rho_star));
        }
        if self.stability == 0 {
            return Err(ConfigError::ZeroStability);
        }
        Ok(())
    }
}

/// Partial configuration as read from a config file or command-line flags.
///
/// The file format is flat TOML. Keys other than the detector's own are
/// ignored so that front ends can keep their settings in the same file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct ConfigOverrides {
    pub rho_star: Option<f64>,
    pub p_max: Option<usize>,
    pub window: Option<usize>,
    pub stability: Option<usize>,
    pub exit_mode: Option<ExitMode>,
    pub exact_lag_entry: Option<bool>,
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))
    }

    /// Layers `higher` on top of `self`; values present in `higher` win.
    pub fn merged_with(self, higher: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            rho_star: higher.rho_star.or(self.rho_star),
            p_max: higher.p_max.or(self.p_max),
            window: higher.window.or(self.window),
            stability: higher.stability.or(self.stability),
            exit_mode: higher.exit_mode.or(self.exit_mode),
            exact_lag_entry: higher.exact_lag_entry.or(self.exact_lag_entry),
        }
    }

    /// Applies the overrides to `base` and validates the result.
    pub fn apply(&self, base: DetectorConfig) -> Result<DetectorConfig, ConfigError> {
        let cfg = DetectorConfig {
            rho_star: self.rho_star.unwrap_or(base.rho_star),
            p_max: self.p_max.unwrap_or(base.p_max),
            window: self.window.unwrap_or(base.window),
            stability: self.stability.unwrap_or(base.stability),
            exit_mode: self.exit_mode.unwrap_or(base.exit_mode),
            exact_lag_entry: self.exact_lag_entry.unwrap_or(base.exact_lag_entry),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Bounded FIFO over the most recent composite-signal values.
///
/// Samples are kept contiguous, oldest first, so the analysis code can work
/// on a plain slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalWindow {
    samples: VecDeque<f64>,
    capacity: usize,
    next_transition: Option<usize>,
}

impl SignalWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self {
            samples: VecDeque::with_capacity(capacity + 1),
            capacity,
            next_transition: None,
        }
    }

    /// Builds a window holding the last `capacity` values of `values`.
    pub fn from_values(capacity: usize, values: &[f64]) -> Self {
        let mut window = Self::new(capacity);
        for &v in values {
            window.push(v);
        }
        window
    }

    /// Appends a raw value, evicting the oldest one when full.
    pub fn push(&mut self, z: f64) {
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(z);
        self.samples.make_contiguous();
    }

    /// Appends a sample's `z`; transition indices must be consecutive.
    pub fn push_sample(&mut self, sample: &DynamicsSample) {
        if let Some(expected) = self.next_transition {
            assert_eq!(
                sample.transition_index, expected,
                "signal window samples must have consecutive transition indices"
            );
        }
        self.next_transition = Some(sample.transition_index + 1);
        self.push(sample.z);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() == self.capacity
    }

    /// Window contents, oldest first.
    pub fn as_slice(&self) -> &[f64] {
        let (head, tail) = self.samples.as_slices();
        debug_assert!(tail.is_empty());
        head
    }

    pub fn clear(&mut self) {
        self.samples.clear();
        self.next_transition = None;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Warmup,
    Normal,
    CycleEnter,
    EarlyExit,
    CycleExit,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Warmup => "warmup",
            EventKind::Normal => "normal",
            EventKind::CycleEnter => "cycle_enter",
            EventKind::EarlyExit => "early_exit",
            EventKind::CycleExit => "cycle_exit",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Annotation emitted for every ingested step.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorEvent {
    pub step_index: usize,
    pub kind: EventKind,
    pub estimate: Option<PeriodEstimate>,
    pub dynamics: Option<DynamicsSample>,
}
