//! Synthetic embedding trajectories.
//!
//! * random walk: `h[0] ~ N(0, I)`, `h[t+1] = h[t] + step_scale * g[t]`
//! * periodic: `p` anchors drawn once, `h[t] = anchor[t mod p] + noise_sigma * g[t]`
//! * composite: segments concatenated, each continuing from the previous
//!   segment's last embedding. A walk segment keeps walking from it; a
//!   periodic segment places its anchors at unit-normal offsets around it.
//!
//! All draws come from one [`TraceRng`] in a fixed order, and noise vectors
//! are drawn even when `noise_sigma` is zero, so changing the noise level
//! never changes the anchors.

use std::fmt;
use std::str::FromStr;

use super::rng::TraceRng;
use super::{Trace, TraceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    RandomWalk,
    Periodic,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Walk,
    Periodic,
}

impl FromStr for SegmentKind {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "walk" | "random_walk" => Ok(SegmentKind::Walk),
            "periodic" => Ok(SegmentKind::Periodic),
            other => Err(TraceError::BadSpec(format!("unknown segment kind {other:?}"))),
        }
    }
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentKind::Walk => "walk",
            SegmentKind::Periodic => "periodic",
        })
    }
}

/// Parses `walk:40,periodic:24`.
pub fn parse_segments(s: &str) -> Result<Vec<(SegmentKind, usize)>, TraceError> {
    s.split(',')
        .map(|part| {
            let (kind, len) = part
                .split_once(':')
                .ok_or_else(|| TraceError::BadSpec(format!("segment {part:?} is not kind:length")))?;
            let len = len
                .trim()
                .parse()
                .map_err(|_| TraceError::BadSpec(format!("segment length {len:?} is not an integer")))?;
            Ok((kind.trim().parse()?, len))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub dim: usize,
    pub length: usize,
    pub period: Option<usize>,
    pub noise_sigma: f64,
    pub step_scale: f64,
    pub segments: Vec<(SegmentKind, usize)>,
    pub seed: u64,
}

impl SynthSpec {
    pub fn random_walk(dim: usize, length: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::RandomWalk,
            dim,
            length,
            period: None,
            noise_sigma: 0.0,
            step_scale: 1.0,
            segments: Vec::new(),
            seed,
        }
    }

    pub fn periodic(dim: usize, length: usize, period: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            kind: SynthKind::Periodic,
            period: Some(period),
            noise_sigma,
            ..Self::random_walk(dim, length, seed)
        }
    }

    /// Composite spec whose length is the sum of its segments.
    pub fn composite(dim: usize, segments: Vec<(SegmentKind, usize)>, period: Option<usize>, seed: u64) -> Self {
        Self {
            kind: SynthKind::Composite,
            length: segments.iter().map(|s| s.1).sum(),
            period,
            segments,
            ..Self::random_walk(dim, 0, seed)
        }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |msg: String| Err(TraceError::BadSpec(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.length == 0 {
            return bad("length must be at least 1".into());
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad(format!("noise_sigma {} must be finite and non-negative", self.noise_sigma));
        }
        if !(self.step_scale.is_finite() && self.step_scale > 0.0) {
            return bad(format!("step_scale {} must be finite and positive", self.step_scale));
        }
        let needs_period = match self.kind {
            SynthKind::RandomWalk => false,
            SynthKind::Periodic => true,
            SynthKind::Composite => self.segments.iter().any(|s| s.0 == SegmentKind::Periodic),
        };
        if needs_period {
            match self.period {
                Some(p) if p >= 1 && p <= self.length => {}
                Some(p) => return bad(format!("period {p} must lie in [1, {}]", self.length)),
                None => return bad("periodic trajectories need a period".into()),
            }
        }
        match self.kind {
            SynthKind::Composite => {
                if self.segments.is_empty() {
                    return bad("composite trajectories need at least one segment".into());
                }
                if self.segments.iter().any(|s| s.1 == 0) {
                    return bad("segment lengths must be positive".into());
                }
                let total: usize = self.segments.iter().map(|s| s.1).sum();
                if total != self.length {
                    return bad(format!("segment lengths sum to {total}, expected {}", self.length));
                }
            }
            _ if !self.segments.is_empty() => return bad("segments are only valid for composite kind".into()),
            _ => {}
        }
        Ok(())
    }
}

/// Deterministically generates the trajectory described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<Trace, TraceError> {
    spec.validate()?;
    let mut rng = TraceRng::new(spec.seed);
    let segments = match spec.kind {
        SynthKind::RandomWalk => vec![(SegmentKind::Walk, spec.length)],
        SynthKind::Periodic => vec![(SegmentKind::Periodic, spec.length)],
        SynthKind::Composite => spec.segments.clone(),
    };

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(spec.length);
    for (kind, len) in segments {
        match kind {
            SegmentKind::Walk => {
                let target = out.len() + len;
                let mut h = match out.last() {
                    Some(prev) => prev.clone(),
                    None => {
                        let start = rng.normal_vec(spec.dim);
                        out.push(start.clone());
                        start
                    }
                };
                while out.len() < target {
                    let g = rng.normal_vec(spec.dim);
                    for (x, gi) in h.iter_mut().zip(&g) {
                        *x += spec.step_scale * gi;
                    }
                    out.push(h.clone());
                }
            }
            SegmentKind::Periodic => {
                let p = spec.period.expect("validated");
                let base = out.last().cloned().unwrap_or_else(|| vec![0.0; spec.dim]);
                let anchors: Vec<Vec<f64>> = (0..p)
                    .map(|_| {
                        let g = rng.normal_vec(spec.dim);
                        base.iter().zip(&g).map(|(b, gi)| b + gi).collect()
                    })
                    .collect();
                for i in 0..len {
                    let g = rng.normal_vec(spec.dim);
                    out.push(
                        anchors[i % p]
                            .iter()
                            .zip(&g)
                            .map(|(a, gi)| a + spec.noise_sigma * gi)
                            .collect(),
                    );
                }
            }
        }
    }
    Ok(Trace::from_embeddings(out))
}
