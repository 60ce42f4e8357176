//! JSON-lines traces and stream frames.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{RecordChecker, Trace, TraceError, TraceRecord};

/// First line of a JSONL stream session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Handshake {
    pub dim: usize,
}

/// One step of a JSONL stream session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamFrame {
    pub step: u64,
    pub embedding: Vec<f64>,
}

pub fn read(reader: impl BufRead) -> Result<Trace, TraceError> {
    let mut checker = RecordChecker::default();
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let index = records.len();
        let record = parse_record(&line, index)?;
        checker.check(index, record.step, &record.embedding)?;
        records.push(record);
    }
    Ok(Trace { records })
}

fn parse_record(line: &str, index: usize) -> Result<TraceRecord, TraceError> {
    serde_json::from_str(line).map_err(|e| TraceError::MalformedRecord {
        record: index,
        message: e.to_string(),
    })
}

pub fn write(writer: &mut impl Write, trace: &Trace) -> Result<(), TraceError> {
    trace.validate()?;
    for record in &trace.records {
        serde_json::to_writer(&mut *writer, record).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
