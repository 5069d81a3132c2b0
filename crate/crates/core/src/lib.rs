//! Detection and localization of volatility change points in high-frequency
//! log-price data.
//!
//! Statistics work on the increments of an equidistant [`LogPriceSeries`]
//! observed on `[0, 1]`:
//!
//! - [`cusum`]: self-normalized cusum test of constant volatility;
//! - [`local_test`]: block-ratio tests for volatility jumps, with
//!   extreme-value or wild-bootstrap critical values, and the threshold test ψ◇;
//! - [`changepoint`]: single and sequential multiple change-point estimation;
//! - [`global_test`]: test for a change in volatility regularity;
//! - [`simulate`] and [`montecarlo`]: seeded path generators and studies.

pub mod blockstats;
pub mod changepoint;
pub mod cusum;
pub mod distributions;
pub mod error;
pub mod montecarlo;
pub mod numeric;
pub mod report;
pub mod series;
pub mod simulate;

pub use blockstats::{Alignment, BlockConfig, TruncationRule};
pub use changepoint::{detect_multiple, estimate_single, ChangePointResult};
pub use error::{Error, Result};
pub use global_test::{GlobalMode, GlobalTestConfig};
pub use local_test::{CriticalValueSource, LocalTestConfig};
pub use report::{CriticalSource, TestReport};
pub use series::{validate_block_config, IncrementSeries, LogPriceSeries};
pub use simulate::{PathScenario, Preset, SimulatedPath};
