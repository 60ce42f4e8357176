//! Brute-force reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the library's numeric code.

#![allow(dead_code, clippy::manual_clamp)]

/// Scalar-loop magnitude change, cosine similarity and composite signal.
pub fn dynamics(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mut dist = 0.0;
    for i in 0..a.len() {
        dist += (b[i] - a[i]) * (b[i] - a[i]);
    }
    let dist = dist.sqrt();

    let mut dot = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
    }
    let mut na = 0.0;
    for x in a {
        na += x * x;
    }
    let mut nb = 0.0;
    for x in b {
        nb += x * x;
    }
    let mut cos = dot / (na.sqrt() * nb.sqrt());
    if cos > 1.0 {
        cos = 1.0;
    }
    if cos < -1.0 {
        cos = -1.0;
    }
    (dist, cos, dist * (1.0 - cos))
}

/// Two-pass Pearson correlation of two explicit segments; 0 when either is flat.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma: f64 = a.iter().sum::<f64>() / n;
    let mb: f64 = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for i in 0..a.len() {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa / n).sqrt() < 1e-12 || (sbb / n).sqrt() < 1e-12 {
        return 0.0;
    }
    let r = sab / (saa.sqrt() * sbb.sqrt());
    r.clamp(-1.0, 1.0)
}

/// Correlation at `lag` for a window given oldest-first, built from
/// explicitly materialized segments.
pub fn lag_r(window: &[f64], lag: usize) -> f64 {
    let n = window.len() - lag;
    let mut current = Vec::with_capacity(n);
    let mut lagged = Vec::with_capacity(n);
    // z_{t-i} and z_{t-i-lag} for i = 1..=n, with z_{t-1} the newest sample.
    for i in 1..=n {
        current.push(window[window.len() - i]);
        lagged.push(window[window.len() - i - lag]);
    }
    pearson(&current, &lagged)
}

/// `(best lag, strength, max r)`: smallest lag within 1e-9 of the maximum.
pub fn best_period(window: &[f64], p_max: usize) -> (usize, f64, f64) {
    let rs: Vec<f64> = (1..=p_max).map(|l| lag_r(window, l)).collect();
    let mut max = f64::NEG_INFINITY;
    for &r in &rs {
        if r > max {
            max = r;
        }
    }
    for (i, &r) in rs.iter().enumerate() {
        if r >= max - 1e-9 {
            return (i + 1, r, max);
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    None,
    Enter,
    Exit,
}

/// Scripted replay of the controller rules over a whole estimate stream.
///
/// In Normal, at step t, look back over every estimate since the phase began
/// and find the longest trailing streak whose estimates all have strength at
/// least `rho_star` and whose lags span at most `band` (2, or 0 for exact
/// entry). Enter when that streak is at least `m` long; the anchor is the
/// latest lag clamped into the band. In Cycle, leave on a weak estimate or a
/// lag more than one from the anchor; the next Normal phase starts after the
/// leaving step.
pub fn controller(stream: &[(usize, f64)], rho_star: f64, m: usize, exact: bool) -> Vec<Mark> {
    let band = if exact { 0 } else { 2 };
    let mut marks = Vec::with_capacity(stream.len());
    let mut in_cycle = false;
    let mut anchor = 0usize;
    let mut phase_start = 0usize;
    for t in 0..stream.len() {
        if !in_cycle {
            let mut streak = 0;
            for j in (phase_start..=t).rev() {
                let slice = &stream[j..=t];
                let all_strong = slice.iter().all(|&(_, r)| r >= rho_star);
                let lo = slice.iter().map(|&(l, _)| l).min().unwrap();
                let hi = slice.iter().map(|&(l, _)| l).max().unwrap();
                if all_strong && hi - lo <= band {
                    streak = t - j + 1;
                } else {
                    break;
                }
            }
            if streak >= m {
                let slice = &stream[t + 1 - m..=t];
                let lo = slice.iter().map(|&(l, _)| l).min().unwrap();
                let hi = slice.iter().map(|&(l, _)| l).max().unwrap();
                let half = band / 2;
                anchor = stream[t].0.max(hi.saturating_sub(half)).min(lo + half);
                in_cycle = true;
                marks.push(Mark::Enter);
            } else {
                marks.push(Mark::None);
            }
        } else {
            let (lag, r) = stream[t];
            if r < rho_star || lag.abs_diff(anchor) > 1 {
                in_cycle = false;
                phase_start = t + 1;
                marks.push(Mark::Exit);
            } else {
                marks.push(Mark::None);
            }
        }
    }
    marks
}

/// Per-step result of a full offline replay.
#[derive(Debug, Clone, PartialEq)]
pub struct Replayed {
    pub kind: &'static str,
    pub estimate: Option<(usize, f64)>,
}

/// Whole-trace replay: dynamics, window correlations and controller rules,
/// all recomputed from scratch at every step. One-shot stops at the first
/// entry, which is reported as `early_exit`.
pub fn replay(trace: &[Vec<f64>], rho_star: f64, p_max: usize, w: usize, m: usize, one_shot: bool) -> Vec<Replayed> {
    let z: Vec<f64> = (1..trace.len()).map(|t| dynamics(&trace[t - 1], &trace[t]).2).collect();
    let mut estimates = Vec::new();
    let mut out = Vec::new();
    for step in 0..trace.len() {
        if step < w {
            out.push(Replayed {
                kind: "warmup",
                estimate: None,
            });
            continue;
        }
        let (lag, rho, _) = best_period(&z[step - w..step], p_max);
        estimates.push((lag, rho));
        let marks = controller(&estimates, rho_star, m, false);
        let kind = match *marks.last().unwrap() {
            Mark::Enter if one_shot => "early_exit",
            Mark::Enter => "cycle_enter",
            Mark::Exit => "cycle_exit",
            Mark::None => "normal",
        };
        out.push(Replayed {
            kind,
            estimate: Some((lag, rho)),
        });
        if kind == "early_exit" {
            break;
        }
    }
    out
}

/// Step index of the first entry, if any.
pub fn first_entry(replayed: &[Replayed]) -> Option<usize> {
    replayed
        .iter()
        .position(|r| r.kind == "early_exit" || r.kind == "cycle_enter")
}
