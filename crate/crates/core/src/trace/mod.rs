//! Trace files and synthetic trajectories.
//!
//! Two on-disk formats are supported. JSONL holds one record per line:
//! `{"step":0,"embedding":[...],"text":"..."}` with `text` optional.
//! The binary format is little-endian: a 16-byte header (`b"CORE"`, version
//! `u16`, dtype `u16`, dim `u32`, record count `u32`) followed by records of a
//! `u32` step index and `dim` floats.

pub mod binary;
pub mod jsonl;
pub mod rng;
pub mod synth;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use binary::{BinaryHeader, Dtype, FrameReader};
pub use synth::{generate, SegmentKind, SynthKind, SynthSpec};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed record {record}: {message}")]
    MalformedRecord { record: usize, message: String },
    #[error("record {record}: dimension mismatch, expected {expected}, got {got}")]
    DimensionMismatch { record: usize, expected: usize, got: usize },
    #[error("file truncated at byte offset {offset} (record {record} incomplete)")]
    TruncatedFile { offset: u64, record: usize },
    #[error("record {record}: non-finite value")]
    NonFiniteValue { record: usize },
    #[error("record {record}: step index {step} does not follow {previous:?}")]
    BadStepIndex {
        record: usize,
        step: u64,
        previous: Option<u64>,
    },
    #[error("{0} trailing bytes after the last record")]
    TrailingData(u64),
    #[error("bad synthetic spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One reasoning step: its embedding and, optionally, its text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub embedding: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// An ordered sequence of records with a common dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Builds a trace from bare embeddings, numbering steps from zero.
    pub fn from_embeddings(embeddings: Vec<Vec<f64>>) -> Self {
        Self {
            records: embeddings
                .into_iter()
                .enumerate()
                .map(|(i, embedding)| TraceRecord {
                    step: i as u64,
                    embedding,
                    text: None,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.records.first().map(|r| r.embedding.len())
    }

    pub fn embeddings(&self) -> Vec<&[f64]> {
        self.records.iter().map(|r| r.embedding.as_slice()).collect()
    }

    /// Checks the trace invariants: constant non-zero dimension, finite
    /// values, and step indices strictly increasing from zero.
    pub fn validate(&self) -> Result<(), TraceError> {
        let mut checker = RecordChecker::default();
        self.records
            .iter()
            .enumerate()
            .try_for_each(|(i, r)| checker.check(i, r.step, &r.embedding))
    }
}

/// Incremental validation shared by the readers.
#[derive(Debug, Default)]
pub(crate) struct RecordChecker {
    dim: Option<usize>,
    previous: Option<u64>,
}

impl RecordChecker {
    pub(crate) fn with_dim(dim: usize) -> Self {
        Self {
            dim: Some(dim),
            previous: None,
        }
    }

    pub(crate) fn check(&mut self, record: usize, step: u64, embedding: &[f64]) -> Result<(), TraceError> {
        let expected = *self.dim.get_or_insert(embedding.len());
        if embedding.len() != expected || expected == 0 {
            return Err(TraceError::DimensionMismatch {
                record,
                expected,
                got: embedding.len(),
            });
        }
        if embedding.iter().any(|v| !v.is_finite()) {
            return Err(TraceError::NonFiniteValue { record });
        }
        let ok = match self.previous {
            None => step == 0,
            Some(prev) => step > prev,
        };
        if !ok {
            return Err(TraceError::BadStepIndex {
                record,
                step,
                previous: self.previous,
            });
        }
        self.previous = Some(step);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Jsonl,
    Binary,
}

impl TraceFormat {
    /// Guesses the format from the leading bytes of a file.
    pub fn sniff(prefix: &[u8]) -> Self {
        if prefix.starts_with(binary::MAGIC) {
            TraceFormat::Binary
        } else {
            TraceFormat::Jsonl
        }
    }
}

pub fn read_trace(path: impl AsRef<Path>, format: TraceFormat) -> Result<Trace, TraceError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        TraceFormat::Jsonl => jsonl::read(reader),
        TraceFormat::Binary => binary::read(reader),
    }
}

/// Reads a trace, detecting the format from its first bytes.
pub fn read_trace_auto(path: impl AsRef<Path>) -> Result<Trace, TraceError> {
    let mut file = File::open(path.as_ref())?;
    let mut prefix = [0u8; 4];
    let n = read_prefix(&mut file, &mut prefix)?;
    read_trace(path, TraceFormat::sniff(&prefix[..n]))
}

fn read_prefix(r: &mut impl Read, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled)
}

/// Writes a trace; binary output stores 32-bit floats.
pub fn write_trace(path: impl AsRef<Path>, trace: &Trace, format: TraceFormat) -> Result<(), TraceError> {
    let mut writer = BufWriter::new(File::create(path)?);
    match format {
        TraceFormat::Jsonl => jsonl::write(&mut writer, trace)?,
        TraceFormat::Binary => binary::write(&mut writer, trace, Dtype::F32)?,
    }
    writer.flush()?;
    Ok(())
}
