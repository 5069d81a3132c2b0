use thiserror::Error;

/// Errors raised by series construction, statistics and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series needs at least {min} increments, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("non-finite value {value} at observation {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("block length k={k} exceeds n/2 for n={n}")]
    BlockTooLarge { n: usize, k: usize },
    #[error("block length k={k} is below the minimum of 2")]
    BlockTooSmall { k: usize },
    #[error("spot-volatility window K={window} is invalid for n={n}")]
    WindowTooLarge { n: usize, window: usize },
    #[error("every increment of block {block} exceeds the truncation level {threshold}")]
    AllTruncated { block: usize, threshold: f64 },
    #[error("zero local realized volatility in the denominator at index {index}")]
    ZeroDenominator { index: usize },
    #[error("quarticity estimate is zero; the cusum test is undefined")]
    DegenerateQuarticity,
    #[error("spot quarticity estimate is zero at increment {index}")]
    ZeroSpotVol { index: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("fBm grid of {n} points exceeds the dense Cholesky cap of {cap}")]
    GridTooLarge { n: usize, cap: usize },
    #[error("covariance matrix lost positive definiteness at row {row} (hurst={hurst})")]
    CholeskyFailure { row: usize, hurst: f64 },
    #[error("bandwidth fixed point did not settle within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("change-point detection exceeded {cap} rounds")]
    MaxIterations { cap: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },
}

impl Error {
    /// Whether the error stems from malformed input or configuration rather
    /// than from degenerate numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input { .. }
                | Error::Config(_)
                | Error::TooShort { .. }
                | Error::NonFinite { .. }
                | Error::BlockTooLarge { .. }
                | Error::BlockTooSmall { .. }
                | Error::WindowTooLarge { .. }
                | Error::Domain(_)
                | Error::GridTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
