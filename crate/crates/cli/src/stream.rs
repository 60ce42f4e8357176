//! Line protocol for live detection.
//!
//! JSONL input is a handshake line `{"dim":N}` followed by one
//! `{"step":t,"embedding":[...]}` frame per line, steps numbered from zero.
//! Binary input is a trace header with record count 0 followed by records.
//! Every frame produces exactly one output line
//! `{"step":t,"event":"...","rho":r|null,"ell":l|null}`, flushed immediately
//! so a caller can alternate writes and reads.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use trajloop::trace::jsonl::{Handshake, StreamFrame};
use trajloop::trace::FrameReader;
use trajloop::{DetectorConfig, DetectorEvent, DetectorSession, EventKind};

use crate::args::FileFormat;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLine {
    pub step: usize,
    pub event: String,
    pub rho: Option<f64>,
    pub ell: Option<usize>,
}

impl From<&DetectorEvent> for EventLine {
    fn from(ev: &DetectorEvent) -> Self {
        Self {
            step: ev.step_index,
            event: ev.kind.as_str().to_string(),
            rho: ev.estimate.as_ref().map(|e| e.strength),
            ell: ev.estimate.as_ref().map(|e| e.best_lag),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamOutcome {
    /// Input ended without an early exit.
    Completed { steps: usize },
    /// One-shot detection fired at this step.
    EarlyExit { step: usize },
}

struct Emitter<'a, W> {
    session: DetectorSession,
    out: &'a mut W,
    dim: usize,
}

impl<W: Write> Emitter<'_, W> {
    fn frame(&mut self, step: u64, embedding: &[f64]) -> Result<Option<StreamOutcome>, CliError> {
        let expected = self.session.steps_seen() as u64;
        if step != expected {
            return Err(CliError::Protocol(format!("expected step {expected}, got {step}")));
        }
        if embedding.len() != self.dim {
            return Err(CliError::Protocol(format!(
                "step {step}: expected dim {}, got {}",
                self.dim,
                embedding.len()
            )));
        }
        let ev = self
            .session
            .push(embedding)
            .map_err(|e| CliError::Protocol(format!("step {step}: {e}")))?;
        serde_json::to_writer(&mut *self.out, &EventLine::from(&ev)).map_err(std::io::Error::from)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok((ev.kind == EventKind::EarlyExit).then_some(StreamOutcome::EarlyExit { step: ev.step_index }))
    }
}

pub fn run_jsonl(config: DetectorConfig, input: impl BufRead, out: &mut impl Write) -> Result<StreamOutcome, CliError> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
    let handshake: Handshake = match lines.next() {
        Some((_, line)) => serde_json::from_str(&line?)
            .map_err(|e| CliError::Protocol(format!("bad handshake: {e}")))?,
        None => return Err(CliError::Protocol("missing handshake".into())),
    };
    if handshake.dim == 0 {
        return Err(CliError::Protocol("handshake dim must be positive".into()));
    }
    let mut emitter = Emitter {
        session: DetectorSession::new(config)?,
        out,
        dim: handshake.dim,
    };
    for (lineno, line) in lines {
        let frame: StreamFrame = serde_json::from_str(&line?)
            .map_err(|e| CliError::Protocol(format!("line {}: {e}", lineno + 1)))?;
        if let Some(done) = emitter.frame(frame.step, &frame.embedding)? {
            return Ok(done);
        }
    }
    Ok(StreamOutcome::Completed {
        steps: emitter.session.steps_seen(),
    })
}

pub fn run_binary(config: DetectorConfig, input: impl Read, out: &mut impl Write) -> Result<StreamOutcome, CliError> {
    let mut frames = FrameReader::open_stream(input).map_err(|e| CliError::Protocol(e.to_string()))?;
    let mut emitter = Emitter {
        session: DetectorSession::new(config)?,
        out,
        dim: frames.header().dim as usize,
    };
    while let Some((step, values)) = frames.next_frame().map_err(|e| CliError::Protocol(e.to_string()))? {
        if let Some(done) = emitter.frame(u64::from(step), &values)? {
            return Ok(done);
        }
    }
    Ok(StreamOutcome::Completed {
        steps: emitter.session.steps_seen(),
    })
}

pub fn run(
    format: FileFormat,
    config: DetectorConfig,
    input: impl BufRead,
    out: &mut impl Write,
) -> Result<StreamOutcome, CliError> {
    match format {
        FileFormat::Jsonl => run_jsonl(config, input, out),
        FileFormat::Binary => run_binary(config, input, out),
    }
}
