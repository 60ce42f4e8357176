//! Windowed lagged correlation of the composite signal.
//!
//! For each candidate lag `l` the window (oldest first, length `W`) is split
//! into a current segment, the last `N = W - l` samples, and a lagged segment,
//! the first `N` samples. Each segment is z-scored against its own mean and
//! population standard deviation and the correlation is the average product
//! of the two normalized segments. The dominant period is the lag with the
//! largest correlation.

use serde::{Deserialize, Serialize};

use crate::error::DetectError;
use crate::model::{DetectorConfig, SignalWindow};

/// Segments whose standard deviation falls below this are treated as flat.
pub const MIN_SEGMENT_STD: f64 = 1e-12;

/// Correlations within this distance of the maximum count as tied; ties go to
/// the smallest lag.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Mean and population standard deviation of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentStats {
    pub mean: f64,
    pub std: f64,
    pub length: usize,
}

impl SegmentStats {
    pub fn of(segment: &[f64]) -> Self {
        let n = segment.len() as f64;
        let mean = segment.iter().sum::<f64>() / n;
        let var = segment.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            length: segment.len(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.std < MIN_SEGMENT_STD
    }
}

/// Best lag and its correlation for one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub best_lag: usize,
    pub strength: f64,
    /// `(lag, r)` for every candidate, when diagnostics were requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_lag: Option<Vec<(usize, f64)>>,
}

/// Lagged correlation over a full window.
pub fn lag_correlation(window: &SignalWindow, lag: usize) -> Result<f64, DetectError> {
    if !window.is_full() {
        return Err(DetectError::WindowNotFull {
            len: window.len(),
            capacity: window.capacity(),
        });
    }
    correlation_at_lag(window.as_slice(), lag)
}

/// Lagged correlation over an arbitrary slice, oldest sample first.
pub fn correlation_at_lag(z: &[f64], lag: usize) -> Result<f64, DetectError> {
    let w = z.len();
    if lag == 0 || lag + 2 > w {
        return Err(DetectError::LagOutOfRange { lag, window: w });
    }
    let current = &z[lag..];
    let lagged = &z[..w - lag];

    let cs = SegmentStats::of(current);
    let ls = SegmentStats::of(lagged);
    if cs.is_degenerate() || ls.is_degenerate() {
        return Ok(0.0);
    }

    let n = current.len() as f64;
    let sum: f64 = current
        .iter()
        .zip(lagged)
        .map(|(c, l)| ((c - cs.mean) / cs.std) * ((l - ls.mean) / ls.std))
        .sum();
    Ok((sum / n).clamp(-1.0, 1.0))
}

/// Evaluates every lag in `1..=cfg.p_max` and picks the strongest.
pub fn best_period(window: &SignalWindow, cfg: &DetectorConfig) -> Result<PeriodEstimate, DetectError> {
    estimate(window, cfg, false)
}

/// Like [`best_period`] but keeps the full `(lag, r)` table.
pub fn best_period_with_diagnostics(
    window: &SignalWindow,
    cfg: &DetectorConfig,
) -> Result<PeriodEstimate, DetectError> {
    estimate(window, cfg, true)
}

fn estimate(window: &SignalWindow, cfg: &DetectorConfig, diagnostics: bool) -> Result<PeriodEstimate, DetectError> {
    if !window.is_full() {
        return Err(DetectError::WindowNotFull {
            len: window.len(),
            capacity: window.capacity(),
        });
    }
    estimate_from_slice(window.as_slice(), cfg.p_max, diagnostics)
}

pub(crate) fn estimate_from_slice(
    z: &[f64],
    p_max: usize,
    diagnostics: bool,
) -> Result<PeriodEstimate, DetectError> {
    let per_lag = (1..=p_max)
        .map(|lag| correlation_at_lag(z, lag).map(|r| (lag, r)))
        .collect::<Result<Vec<_>, _>>()?;

    let max = per_lag.iter().map(|&(_, r)| r).fold(f64::NEG_INFINITY, f64::max);
    let &(best_lag, strength) = per_lag
        .iter()
        .find(|&&(_, r)| r >= max - TIE_TOLERANCE)
        .expect("p_max >= 1");

    Ok(PeriodEstimate {
        best_lag,
        strength,
        per_lag: diagnostics.then_some(per_lag),
    })
}
