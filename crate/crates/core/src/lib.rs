//! Streaming detection of quasi-cyclic redundancy in a reasoning model's
//! step-embedding trajectory.
//!
//! Each reasoning step contributes one embedding. Consecutive embeddings
//! yield a composite signal `z = |h[t+1] - h[t]| * (1 - cos(h[t], h[t+1]))`;
//! a sliding window over `z` is scanned for lagged self-correlation, and a
//! hysteresis controller turns sustained, stable periodicity into a cycle
//! entry that can end generation early.
//!
//! ```
//! use trajloop::{DetectorConfig, DetectorSession, EventKind};
//! use trajloop::trace::{generate, SegmentKind, SynthSpec};
//!
//! let spec = SynthSpec::composite(
//!     16,
//!     vec![(SegmentKind::Walk, 40), (SegmentKind::Periodic, 60)],
//!     Some(4),
//!     7,
//! );
//! let trace = generate(&spec).unwrap();
//!
//! let mut session = DetectorSession::new(DetectorConfig::default()).unwrap();
//! let exit = trace
//!     .records
//!     .iter()
//!     .map(|r| session.push(&r.embedding).unwrap())
//!     .find(|ev| ev.kind == EventKind::EarlyExit)
//!     .expect("the 4-cycle is detected");
//! assert_eq!(exit.estimate.unwrap().best_lag, 4);
//! ```
//!
//! The `book/` directory at the repository root walks through each stage in
//! more depth; its code listings are compiled and run as doctests of this
//! crate.

pub mod detector;
pub mod dynamics;
pub mod error;
pub mod hysteresis;
pub mod model;
pub mod periodicity;
pub mod trace;

pub use detector::{analyze_trace, DetectorSession};
pub use dynamics::compute_transition;
pub use error::{ConfigError, DetectError};
pub use hysteresis::{ControllerState, Phase, Transition};
pub use model::{
    ConfigOverrides, DetectorConfig, DetectorEvent, DynamicsSample, Embedding, EventKind, ExitMode, SignalWindow,
};
pub use periodicity::{best_period, best_period_with_diagnostics, lag_correlation, PeriodEstimate, SegmentStats};

// `cargo test --doc` compiles and runs every listing in the book.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/periodicity.md")]
    mod periodicity {}
    #[doc = include_str!("../../../book/src/hysteresis.md")]
    mod hysteresis {}
    #[doc = include_str!("../../../book/src/detector.md")]
    mod detector {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
