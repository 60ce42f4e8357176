//! First-detection step over a grid of thresholds and stability counts.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use trajloop::trace::{read_trace_auto, Trace};
use trajloop::{analyze_trace, ConfigOverrides, DetectorConfig, EventKind, ExitMode};

use crate::args::SweepArgs;
use crate::CliError;

pub const CSV_HEADER: &str = "trace,rho_star,stability,first_detection,steps,steps_saved";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub trace: String,
    pub rho_star: f64,
    pub stability: usize,
    pub first_detection: Option<usize>,
    pub steps: usize,
}

impl SweepRow {
    /// Steps after the exit that a one-shot run would not generate.
    pub fn steps_saved(&self) -> usize {
        self.first_detection.map_or(0, |s| self.steps - 1 - s)
    }
}

fn parse_grid<T: std::str::FromStr>(name: &str, text: &str) -> Result<Vec<T>, CliError> {
    let values: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Config(format!("{name}: cannot parse {s:?}"))))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    Ok(values)
}

/// One-shot first detection for every (trace, rho_star, stability) cell, in
/// input order.
pub fn sweep(
    traces: &[(String, Trace)],
    base: DetectorConfig,
    rho_grid: &[f64],
    stability_grid: &[usize],
) -> Result<Vec<SweepRow>, CliError> {
    if rho_grid.is_empty() || stability_grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let mut cells = Vec::new();
    for (name, trace) in traces {
        for &rho_star in rho_grid {
            for &stability in stability_grid {
                let cfg = ConfigOverrides {
                    rho_star: Some(rho_star),
                    stability: Some(stability),
                    exit_mode: Some(ExitMode::OneShot),
                    ..ConfigOverrides::default()
                }
                .apply(base)?;
                cells.push((name, trace, cfg));
            }
        }
    }
    cells
        .par_iter()
        .map(|(name, trace, cfg)| {
            let events = analyze_trace(&trace.embeddings(), cfg)
                .map_err(|e| CliError::Malformed(format!("{name}: {e}")))?;
            Ok(SweepRow {
                trace: name.to_string(),
                rho_star: cfg.rho_star,
                stability: cfg.stability,
                first_detection: events.iter().find(|e| e.kind == EventKind::EarlyExit).map(|e| e.step_index),
                steps: trace.len(),
            })
        })
        .collect()
}

pub fn write_csv(rows: &[SweepRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let first = r.first_detection.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "{},{},{},{first},{},{}", r.trace, r.rho_star, r.stability, r.steps, r.steps_saved())?;
    }
    Ok(())
}

pub fn run(args: &SweepArgs, out: &mut impl Write) -> Result<Vec<SweepRow>, CliError> {
    let base = args.detector.resolve(ExitMode::OneShot)?;
    let rho_grid = match &args.rho_grid {
        Some(g) => parse_grid("--rho-grid", g)?,
        None => vec![base.rho_star],
    };
    let stability_grid = match &args.stability_grid {
        Some(g) => parse_grid("--stability-grid", g)?,
        None => vec![base.stability],
    };
    let traces = args
        .inputs
        .iter()
        .map(|p: &PathBuf| Ok((p.display().to_string(), read_trace_auto(p)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = sweep(&traces, base, &rho_grid, &stability_grid)?;
    write_csv(&rows, out)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse_and_reject_empty() {
        assert_eq!(parse_grid::<f64>("g", "0.1, 0.7").unwrap(), vec![0.1, 0.7]);
        assert_eq!(parse_grid::<f64>("g", " , ").unwrap_err().exit_code(), 3);
        assert_eq!(parse_grid::<usize>("g", "1,x").unwrap_err().exit_code(), 3);
        assert_eq!(sweep(&[], DetectorConfig::default(), &[], &[1]).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn invalid_grid_value_is_a_config_error() {
        let t = vec![("t".to_string(), Trace::from_embeddings(vec![vec![1.0]; 3]))];
        let err = sweep(&t, DetectorConfig::default(), &[1.5], &[8]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn steps_saved_counts_the_tail() {
        let mut row = SweepRow {
            trace: "t".into(),
            rho_star: 0.7,
            stability: 8,
            first_detection: Some(56),
            steps: 100,
        };
        assert_eq!(row.steps_saved(), 43);
        row.first_detection = None;
        assert_eq!(row.steps_saved(), 0);
    }
}
