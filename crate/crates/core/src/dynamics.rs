//! Per-transition geometry of an embedding trajectory.

use crate::error::DetectError;
use crate::model::{DynamicsSample, Embedding};

/// Norms below this are treated as zero vectors.
pub const MIN_NORM: f64 = 1e-12;

/// Magnitude change, cosine similarity and composite signal between two
/// consecutive step embeddings.
///
/// The sample's `transition_index` is the step index of `prev`.
pub fn compute_transition(prev: &Embedding, next: &Embedding) -> Result<DynamicsSample, DetectError> {
    transition_between(prev.values(), next.values(), prev.step_index())
}

/// Slice form of [`compute_transition`].
pub fn transition_between(
    prev: &[f64],
    next: &[f64],
    transition_index: usize,
) -> Result<DynamicsSample, DetectError> {
    if prev.len() != next.len() {
        return Err(DetectError::DimensionMismatch {
            expected: prev.len(),
            got: next.len(),
        });
    }

    // One pass: squared distance, dot product and both squared norms.
    let (mut dist_sq, mut dot, mut prev_sq, mut next_sq) = (0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in prev.iter().zip(next) {
        let d = b - a;
        dist_sq += d * d;
        dot += a * b;
        prev_sq += a * a;
        next_sq += b * b;
    }

    let prev_norm = prev_sq.sqrt();
    let next_norm = next_sq.sqrt();
    if prev_norm < MIN_NORM || next_norm < MIN_NORM {
        return Err(DetectError::ZeroNormVector);
    }

    let delta_mag = dist_sq.sqrt();
    let cos_ang = (dot / (prev_norm * next_norm)).clamp(-1.0, 1.0);
    Ok(DynamicsSample {
        transition_index,
        delta_mag,
        cos_ang,
        z: delta_mag * (1.0 - cos_ang),
    })
}
