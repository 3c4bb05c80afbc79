use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: only 1 and 2 are supported")]
    InvalidDimension(usize),

    #[error("non-positive extent: {0}")]
    NonPositiveExtent(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("interpolation stencil of order {order} needs at least {} points, line has {len}", order + 1)]
    StencilTooLarge { order: usize, len: usize },

    #[error("interpolation order must be odd, got {0}")]
    EvenOrder(usize),

    #[error("modified-potential right-hand side has mean {mean:e} (scale {scale:e})")]
    RhsMeanTooLarge { mean: f64, scale: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scheme `{0}` is not symmetric")]
    AsymmetricSpec(String),

    #[error("order conditions are not available for scheme `{0}`")]
    UnsupportedFamily(String),

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("diagnostic series is empty")]
    EmptySeries,

    #[error("initial {0} is zero, relative error undefined")]
    ZeroInitial(&'static str),

    #[error("all sweep points lie on the phase-space error floor")]
    AllPointsOnFloor,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite state after step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the CLI: 3 for a numerical blow-up, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } => 3,
            _ => 1,
        }
    }
}
