use thiserror::Error;

/// Errors produced by register bookkeeping, state algebra and protocol runs.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two registers (or a register and a new label) share a mode name.
    #[error("mode label collision: `{0}`")]
    LabelCollision(String),

    /// A mode label was requested that the register does not contain.
    #[error("unknown mode label: `{0}`")]
    UnknownMode(String),

    /// The same mode was named twice in a target list.
    #[error("duplicate target mode: `{0}`")]
    DuplicateTarget(String),

    /// A register needs at least one mode and unique labels.
    #[error("invalid register: {0}")]
    InvalidRegister(String),

    /// Vector or matrix dimension does not match the register.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operator was applied to the wrong number of modes.
    #[error("arity mismatch: operator acts on {op} modes, {targets} targets given")]
    ArityMismatch { op: usize, targets: usize },

    /// Two states live on different registers.
    #[error("register mismatch")]
    RegisterMismatch,

    /// Conditioning on an outcome of (numerically) zero probability.
    #[error("zero-probability measurement branch")]
    ZeroProbabilityBranch,

    /// A measurement element must be positive semidefinite.
    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    /// `partial_trace` needs a nonempty set of modes to keep.
    #[error("empty keep set in partial trace")]
    EmptyKeepSet,

    /// A physical parameter was outside its allowed range.
    #[error("parameter `{name}` = {value} outside [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Input amplitudes must satisfy |alpha|^2 + |beta|^2 = 1.
    #[error("input amplitudes not normalized: |alpha|^2 + |beta|^2 = {0}")]
    AmplitudesNotNormalized(f64),

    /// The gain expression has a vanishing denominator at this operating point.
    #[error("gain diverges: heralding weight {0:.3e} is numerically zero")]
    InfiniteGain(f64),

    /// Channel transmissivity of zero carries no signal.
    #[error("infinite attenuation: transmissivity is zero")]
    InfiniteAttenuation,
}

pub type Result<T> = std::result::Result<T, Error>;
