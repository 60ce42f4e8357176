use thiserror::Error;

/// A configuration that violates one of the detector's structural constraints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("window {window} is too small for p_max {p_max}: need window >= p_max + 2")]
    WindowTooSmall { window: usize, p_max: usize },
    #[error("rho_star {0} must lie in (0, 1]")]
    BadThreshold(f64),
    #[error("stability must be at least 1")]
    ZeroStability,
    #[error("p_max must be at least 1")]
    ZeroMaxPeriod,
    #[error("unknown exit mode {0:?} (expected one_shot or monitor)")]
    UnknownExitMode(String),
    #[error("config file: {0}")]
    Parse(String),
}

/// Errors raised while ingesting embeddings or evaluating the signal window.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedding is empty")]
    EmptyEmbedding,
    #[error("non-finite value at component {component}")]
    NonFiniteInput { component: usize },
    #[error("embedding norm is below 1e-12; cosine similarity is undefined")]
    ZeroNormVector,
    #[error("signal window holds {len} of {capacity} samples")]
    WindowNotFull { len: usize, capacity: usize },
    #[error("lag {lag} out of range for window {window}: need 1 <= lag <= window - 2")]
    LagOutOfRange { lag: usize, window: usize },
    #[error("session already emitted early_exit; reset it before pushing again")]
    SessionTerminated,
    #[error(transparent)]
    Config(#[from] ConfigError),
}
