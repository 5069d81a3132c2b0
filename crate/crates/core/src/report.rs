//! Serializable test outcomes shared by every test in the crate.

use serde::{Deserialize, Serialize};

/// Where a critical value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalSource {
    LimitLaw,
    Bootstrap { replications: usize },
}

/// Outcome of a single hypothesis test.
///
/// `decision` is `true` when the null hypothesis is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub raw_stat: f64,
    pub rescaled_stat: f64,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub decision: bool,
    pub level: f64,
    pub critical_source: CriticalSource,
    /// 1-based increment (or split) index attaining the maximum.
    pub argmax_index: Option<usize>,
    pub warnings: Vec<String>,
}
