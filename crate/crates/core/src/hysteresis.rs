//! Two-state hysteresis controller over per-step period estimates.
//!
//! In `Normal` the controller tracks the current run: the longest trailing
//! streak of estimates that all clear `rho_star` and whose lags fit inside a
//! band of width two (every lag within one of a common centre). When the run
//! reaches `stability` estimates the controller enters `Cycle`, anchored at
//! the centre of the band. In `Cycle` it stays put until an estimate falls
//! below `rho_star` or its lag moves more than one away from the anchor.
//!
//! Because a run is defined by a property that holds for every suffix of it,
//! lowering `rho_star` or `stability` can only make the first entry happen
//! earlier, never later.

use std::collections::VecDeque;

use crate::model::DetectorConfig;
use crate::periodicity::PeriodEstimate;

/// Largest lag deviation tolerated around the anchor.
pub const LAG_TOLERANCE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Normal,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    None,
    EnteredCycle,
    ExitedCycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllerState {
    phase: Phase,
    anchor_lag: Option<usize>,
    /// Lags of the current run, oldest first. Never longer than `stability`.
    run: VecDeque<usize>,
    /// Set by the session once an early exit has been emitted.
    pub exited: bool,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self::new()
    }
}

impl ControllerState {
    pub fn new() -> Self {
        Self {
            phase: Phase::Normal,
            anchor_lag: None,
            run: VecDeque::new(),
            exited: false,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Lag the current run or locked cycle is centred on.
    pub fn anchor_lag(&self) -> Option<usize> {
        self.anchor_lag
    }

    /// Consecutive qualifying estimates accumulated while in `Normal`.
    pub fn run_length(&self) -> usize {
        self.run.len()
    }

    /// Feeds one estimate and reports the resulting transition.
    pub fn advance(&mut self, est: &PeriodEstimate, cfg: &DetectorConfig) -> Transition {
        let qualifies = est.strength >= cfg.rho_star;
        match self.phase {
            Phase::Normal => {
                if !qualifies {
                    self.reset_run();
                    return Transition::None;
                }
                let band = if cfg.exact_lag_entry { 0 } else { 2 * LAG_TOLERANCE };
                self.run.push_back(est.best_lag);
                while spread(&self.run) > band {
                    self.run.pop_front();
                }
                let anchor = centre(&self.run, est.best_lag, band / 2);
                if self.run.len() >= cfg.stability {
                    self.phase = Phase::Cycle;
                    self.anchor_lag = Some(anchor);
                    self.run.clear();
                    Transition::EnteredCycle
                } else {
                    self.anchor_lag = Some(anchor);
                    Transition::None
                }
            }
            Phase::Cycle => {
                let anchor = self.anchor_lag.expect("cycle phase always has an anchor");
                if !qualifies || est.best_lag.abs_diff(anchor) > LAG_TOLERANCE {
                    self.phase = Phase::Normal;
                    self.reset_run();
                    Transition::ExitedCycle
                } else {
                    Transition::None
                }
            }
        }
    }

    fn reset_run(&mut self) {
        self.run.clear();
        self.anchor_lag = None;
    }
}

/// Pure form of [`ControllerState::advance`].
pub fn update(
    state: &ControllerState,
    est: &PeriodEstimate,
    cfg: &DetectorConfig,
) -> (ControllerState, Transition) {
    let mut next = state.clone();
    let transition = next.advance(est, cfg);
    (next, transition)
}

fn spread(lags: &VecDeque<usize>) -> usize {
    let lo = lags.iter().min().copied().unwrap_or(0);
    let hi = lags.iter().max().copied().unwrap_or(0);
    hi - lo
}

/// Centre of the band closest to the latest lag.
fn centre(lags: &VecDeque<usize>, latest: usize, half_width: usize) -> usize {
    let lo = *lags.iter().min().expect("run is non-empty");
    let hi = *lags.iter().max().expect("run is non-empty");
    latest.clamp(hi.saturating_sub(half_width), lo + half_width)
}
