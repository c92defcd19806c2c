use thiserror::Error;

/// Errors raised by the simulator modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty signal")]
    EmptySignal,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),

    #[error("frequency shift of {shift_hz} Hz aliases the occupied band at {sample_rate} Hz")]
    Aliasing { shift_hz: f64, sample_rate: f64 },

    #[error("expected a dual-polarization signal")]
    NotDualPol,

    #[error("point {0} is not in the constellation")]
    NotAConstellationPoint(String),

    #[error("channel impulse response is identically zero")]
    ZeroChannel,

    #[error("spectral factorization failed: {0}")]
    Factorization(String),

    #[error("no BER crossing of {target:e} in the OSNR range [{lo_db}, {hi_db}] dB")]
    NoCrossing { target: f64, lo_db: f64, hi_db: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
