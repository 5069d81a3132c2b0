//! Versioned JSON report and flat CSV rows.

use serde::{Deserialize, Serialize};
use volcp_core::montecarlo::{EcdfRow, RateRow};
use volcp_core::{ChangePointResult, CriticalSource, TestReport, TruncationRule};

use crate::args::Command;

pub const SCHEMA_VERSION: u32 = 1;

/// Values fixed at run time that the arguments leave open.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    /// Number of increments.
    pub n: usize,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub spot_window: Option<usize>,
    pub truncation: Option<TruncationRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTables {
    pub rates: Vec<RateRow>,
    pub ecdf: Vec<EcdfRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub true_change_points: Vec<f64>,
    /// `(grid index, size)` of every price jump.
    pub price_jumps: Vec<(usize, f64)>,
    pub logprice: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: u32,
    pub version: String,
    pub config: Command,
    pub resolved: Resolved,
    #[serde(default)]
    pub reports: Vec<TestReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_points: Option<ChangePointResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyTables>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Simulation>,
    pub elapsed_seconds: f64,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(config: Command) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            resolved: Resolved::default(),
            reports: Vec::new(),
            change_points: None,
            study: None,
            simulation: None,
            elapsed_seconds: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// One test report as a CSV row; warnings stay in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub test: String,
    pub raw_stat: f64,
    pub rescaled_stat: f64,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub decision: bool,
    pub level: f64,
    pub critical_source: String,
    pub bootstrap_replications: Option<usize>,
    pub argmax_index: Option<usize>,
}

impl From<&TestReport> for ReportRow {
    fn from(r: &TestReport) -> Self {
        let (source, reps) = match r.critical_source {
            CriticalSource::LimitLaw => ("limit_law", None),
            CriticalSource::Bootstrap { replications } => ("bootstrap", Some(replications)),
        };
        Self {
            test: r.test.clone(),
            raw_stat: r.raw_stat,
            rescaled_stat: r.rescaled_stat,
            critical_value: r.critical_value,
            p_value: r.p_value,
            decision: r.decision,
            level: r.level,
            critical_source: source.into(),
            bootstrap_replications: reps,
            argmax_index: r.argmax_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub index: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub time: f64,
    pub logprice: f64,
}
