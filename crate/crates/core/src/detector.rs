//! Streaming session: embeddings in, one [`DetectorEvent`] out per step.

use crate::dynamics::{compute_transition, transition_between};
use crate::error::{ConfigError, DetectError};
use crate::hysteresis::{ControllerState, Phase, Transition};
use crate::model::{DetectorConfig, DetectorEvent, Embedding, EventKind, ExitMode, SignalWindow};
use crate::periodicity::{best_period, estimate_from_slice};

/// One logical stream of reasoning-step embeddings.
///
/// The first `window` pushes are warmup; the window needs `window` composite
/// samples, i.e. `window + 1` embeddings, before any detection runs.
#[derive(Debug, Clone)]
pub struct DetectorSession {
    config: DetectorConfig,
    dim: Option<usize>,
    last_embedding: Option<Embedding>,
    window: SignalWindow,
    controller: ControllerState,
    steps_seen: usize,
}

impl DetectorSession {
    pub fn new(config: DetectorConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            config,
            dim: None,
            last_embedding: None,
            window: SignalWindow::new(config.window),
            controller: ControllerState::new(),
            steps_seen: 0,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Embedding dimension, once locked by the first push.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn steps_seen(&self) -> usize {
        self.steps_seen
    }

    pub fn window(&self) -> &SignalWindow {
        &self.window
    }

    pub fn controller(&self) -> &ControllerState {
        &self.controller
    }

    /// True once a one-shot session has emitted its early exit.
    pub fn is_terminated(&self) -> bool {
        self.config.exit_mode == ExitMode::OneShot && self.controller.exited
    }

    pub fn push(&mut self, values: &[f64]) -> Result<DetectorEvent, DetectError> {
        self.push_embedding(Embedding::new(self.steps_seen, values.to_vec())?)
    }

    pub fn push_f32(&mut self, values: &[f32]) -> Result<DetectorEvent, DetectError> {
        self.push_embedding(Embedding::from_f32(self.steps_seen, values)?)
    }

    /// Ingests one embedding. The session is unchanged if this returns an error.
    pub fn push_embedding(&mut self, embedding: Embedding) -> Result<DetectorEvent, DetectError> {
        if self.is_terminated() {
            return Err(DetectError::SessionTerminated);
        }
        if let Some(expected) = self.dim {
            if embedding.dim() != expected {
                return Err(DetectError::DimensionMismatch {
                    expected,
                    got: embedding.dim(),
                });
            }
        }
        let step_index = self.steps_seen;
        let embedding = Embedding::new(step_index, embedding.into_values())?;

        let Some(prev) = self.last_embedding.as_ref() else {
            self.dim = Some(embedding.dim());
            self.last_embedding = Some(embedding);
            self.steps_seen += 1;
            return Ok(DetectorEvent {
                step_index,
                kind: EventKind::Warmup,
                estimate: None,
                dynamics: None,
            });
        };

        let sample = compute_transition(prev, &embedding)?;
        self.window.push_sample(&sample);
        self.last_embedding = Some(embedding);
        self.steps_seen += 1;

        if !self.window.is_full() {
            return Ok(DetectorEvent {
                step_index,
                kind: EventKind::Warmup,
                estimate: None,
                dynamics: Some(sample),
            });
        }

        let estimate = best_period(&self.window, &self.config)?;
        let transition = self.controller.advance(&estimate, &self.config);
        let kind = match transition {
            Transition::EnteredCycle
                if self.config.exit_mode == ExitMode::OneShot && !self.controller.exited =>
            {
                self.controller.exited = true;
                EventKind::EarlyExit
            }
            Transition::EnteredCycle => EventKind::CycleEnter,
            Transition::ExitedCycle => EventKind::CycleExit,
            Transition::None => EventKind::Normal,
        };
        Ok(DetectorEvent {
            step_index,
            kind,
            estimate: Some(estimate),
            dynamics: Some(sample),
        })
    }

    /// Controller phase after the latest push.
    pub fn phase(&self) -> Phase {
        self.controller.phase()
    }

    /// Returns the session to its freshly created state, keeping the config.
    pub fn reset(&mut self) {
        self.dim = None;
        self.last_embedding = None;
        self.window.clear();
        self.controller = ControllerState::new();
        self.steps_seen = 0;
    }
}

/// Offline analysis of a complete trace.
///
/// Computes the whole composite signal up front, then slides over it. This
/// shares no state machinery with [`DetectorSession`] beyond the hysteresis
/// controller, and produces the same events as pushing the trace step by step.
/// A one-shot analysis stops after the early exit.
pub fn analyze_trace<V: AsRef<[f64]>>(
    embeddings: &[V],
    config: &DetectorConfig,
) -> Result<Vec<DetectorEvent>, DetectError> {
    config.validate()?;
    let Some(first) = embeddings.first() else {
        return Ok(Vec::new());
    };
    let dim = first.as_ref().len();
    for (i, e) in embeddings.iter().enumerate() {
        let e = e.as_ref();
        if e.len() != dim {
            return Err(DetectError::DimensionMismatch {
                expected: dim,
                got: e.len(),
            });
        }
        Embedding::new(i, e.to_vec())?;
    }

    let samples = embeddings
        .windows(2)
        .enumerate()
        .map(|(i, pair)| transition_between(pair[0].as_ref(), pair[1].as_ref(), i))
        .collect::<Result<Vec<_>, _>>()?;
    let z: Vec<f64> = samples.iter().map(|s| s.z).collect();

    let w = config.window;
    let mut controller = ControllerState::new();
    let mut events = Vec::with_capacity(embeddings.len());
    for step in 0..embeddings.len() {
        let dynamics = step.checked_sub(1).map(|i| samples[i]);
        if step < w {
            events.push(DetectorEvent {
                step_index: step,
                kind: EventKind::Warmup,
                estimate: None,
                dynamics,
            });
            continue;
        }
        let estimate = estimate_from_slice(&z[step - w..step], config.p_max, false)?;
        let kind = match controller.advance(&estimate, config) {
            Transition::EnteredCycle if config.exit_mode == ExitMode::OneShot => EventKind::EarlyExit,
            Transition::EnteredCycle => EventKind::CycleEnter,
            Transition::ExitedCycle => EventKind::CycleExit,
            Transition::None => EventKind::Normal,
        };
        events.push(DetectorEvent {
            step_index: step,
            kind,
            estimate: Some(estimate),
            dynamics,
        });
        if kind == EventKind::EarlyExit {
            break;
        }
    }
    Ok(events)
}
