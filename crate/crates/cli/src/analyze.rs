use std::fs::File;
use std::io::{BufWriter, Write};

use trajloop::trace::{read_trace, read_trace_auto, Trace};
use trajloop::{DetectorConfig, DetectorEvent, DetectorSession, EventKind, ExitMode, Phase};

use crate::args::AnalyzeArgs;
use crate::CliError;

pub const CSV_HEADER: &str = "step,delta_mag,cos_ang,z,best_lag,rho,state,event";

/// Outcome of running one session over a whole trace.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub steps: usize,
    pub events: Vec<DetectorEvent>,
    /// Controller phase after each event.
    pub phases: Vec<Phase>,
}

impl Analysis {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn first(&self, kind: EventKind) -> Option<usize> {
        self.events.iter().find(|e| e.kind == kind).map(|e| e.step_index)
    }

    pub fn write_summary(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "steps: {}", self.steps)?;
        writeln!(out, "processed: {}", self.events.len())?;
        for kind in [
            EventKind::Warmup,
            EventKind::Normal,
            EventKind::CycleEnter,
            EventKind::CycleExit,
            EventKind::EarlyExit,
        ] {
            writeln!(out, "{}: {}", kind, self.count(kind))?;
        }
        let show = |s: Option<usize>| s.map_or_else(|| "none".to_string(), |v| v.to_string());
        writeln!(out, "first_cycle_enter: {}", show(self.first(EventKind::CycleEnter)))?;
        writeln!(out, "first_early_exit: {}", show(self.first(EventKind::EarlyExit)))
    }

    /// One row per processed step. Diagnostic cells are empty where a value
    /// does not exist yet (no dynamics on the first step, no estimate during
    /// warmup).
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (ev, phase) in self.events.iter().zip(&self.phases) {
            let (d, c, z) = match ev.dynamics {
                Some(s) => (s.delta_mag.to_string(), s.cos_ang.to_string(), s.z.to_string()),
                None => Default::default(),
            };
            let (lag, rho) = match &ev.estimate {
                Some(e) => (e.best_lag.to_string(), e.strength.to_string()),
                None => Default::default(),
            };
            let state = match (ev.kind, phase) {
                (EventKind::Warmup, _) => "warmup",
                (_, Phase::Normal) => "normal",
                (_, Phase::Cycle) => "cycle",
            };
            writeln!(out, "{},{d},{c},{z},{lag},{rho},{state},{}", ev.step_index, ev.kind)?;
        }
        Ok(())
    }
}

/// Pushes every record through a fresh session. One-shot sessions stop at
/// the early exit.
pub fn analyze(trace: &Trace, config: DetectorConfig) -> Result<Analysis, CliError> {
    let mut session = DetectorSession::new(config)?;
    let mut events = Vec::with_capacity(trace.len());
    let mut phases = Vec::with_capacity(trace.len());
    for (i, record) in trace.records.iter().enumerate() {
        let ev = session
            .push(&record.embedding)
            .map_err(|e| CliError::Malformed(format!("record {i}: {e}")))?;
        let done = ev.kind == EventKind::EarlyExit;
        events.push(ev);
        phases.push(session.phase());
        if done {
            break;
        }
    }
    Ok(Analysis {
        steps: trace.len(),
        events,
        phases,
    })
}

pub fn run(args: &AnalyzeArgs, out: &mut impl Write) -> Result<Analysis, CliError> {
    let config = args.detector.resolve(ExitMode::Monitor)?;
    let trace = match args.format {
        Some(f) => read_trace(&args.input, f.into())?,
        None => read_trace_auto(&args.input)?,
    };
    let analysis = analyze(&trace, config)?;
    analysis.write_summary(out)?;
    if let Some(path) = &args.csv {
        let mut w = BufWriter::new(File::create(path)?);
        analysis.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(analysis)
}
