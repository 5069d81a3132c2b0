//! Observation containers for equidistant log-price data on the unit interval.
//!
//! Every statistic in this crate works on the increments of a
//! [`LogPriceSeries`]. The sampling grid is implicit: `n + 1` observations
//! at times `i / n`, `i = 0..=n`, whatever the wall-clock span of the
//! input was.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equidistant log-price observations `X_{i/n}`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPriceSeries {
    values: Vec<f64>,
}

impl LogPriceSeries {
    /// Validates and wraps `n + 1` log prices (`n >= 2`).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::TooShort {
                min: 2,
                got: values.len().saturating_sub(1),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    /// Builds the series from raw (positive) prices by taking natural logs.
    pub fn from_prices(prices: &[f64]) -> Result<Self> {
        if let Some((index, &value)) = prices.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
            return Err(Error::Domain(format!(
                "price {value} at observation {index} is not strictly positive"
            )));
        }
        Self::new(prices.iter().map(|p| p.ln()).collect())
    }

    /// Rebuilds a path from a start value and increments by cumulative summation.
    pub fn from_increments(x0: f64, deltas: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(deltas.len() + 1);
        let mut x = x0;
        values.push(x);
        for d in deltas {
            x += d;
            values.push(x);
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of increments.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid mesh `1 / n`.
    pub fn mesh(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn increments(&self) -> IncrementSeries {
        IncrementSeries {
            deltas: self.values.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }

    /// Reads a `time,price` or `time,logprice` CSV file.
    ///
    /// Timestamps only serve to check that sampling is equidistant: every
    /// spacing must lie within 10% of the median spacing.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Input {
            line: 1,
            message: e.to_string(),
        })?;
        let cols: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        let is_log = match cols.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["time", "price"] => false,
            ["time", "logprice"] => true,
            _ => {
                return Err(Error::Input {
                    line: 1,
                    message: format!(
                        "expected header `time,price` or `time,logprice`, found `{}`",
                        cols.join(",")
                    ),
                })
            }
        };

        let mut times = Vec::new();
        let mut prices = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Input {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let parse = |idx: usize, name: &str| -> Result<f64> {
                let field = record.get(idx).ok_or_else(|| Error::Input {
                    line,
                    message: format!("missing {name} column"),
                })?;
                let v: f64 = field.parse().map_err(|_| Error::Input {
                    line,
                    message: format!("cannot parse {name} value `{field}`"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Input {
                        line,
                        message: format!("non-finite {name} value `{field}`"),
                    });
                }
                Ok(v)
            };
            times.push((parse(0, "time")?, line));
            let p = parse(1, if is_log { "logprice" } else { "price" })?;
            if !is_log && p <= 0.0 {
                return Err(Error::Input {
                    line,
                    message: format!("price {p} is not strictly positive"),
                });
            }
            prices.push(if is_log { p } else { p.ln() });
        }
        check_equidistant(&times)?;
        Self::new(prices)
    }
}

fn check_equidistant(times: &[(f64, usize)]) -> Result<()> {
    if times.len() < 2 {
        return Ok(());
    }
    let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1].0 - w[0].0).collect();
    for (w, g) in times.windows(2).zip(&gaps) {
        if *g <= 0.0 {
            return Err(Error::Input {
                line: w[1].1,
                message: "timestamps must be strictly increasing".into(),
            });
        }
    }
    let mut sorted = gaps.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    for (w, g) in times.windows(2).zip(gaps.drain(..)) {
        if (g - median).abs() > 0.1 * median {
            return Err(Error::Input {
                line: w[1].1,
                message: format!(
                    "sampling is not equidistant: spacing {g} deviates from median {median} by more than 10%"
                ),
            });
        }
    }
    Ok(())
}

/// First differences `Δ_i X = X_i - X_{i-1}`, `i = 1..=n`.
///
/// Statistics index increments 1-based in their documentation, matching the
/// usual high-frequency notation; `deltas()[i - 1]` holds `Δ_i X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementSeries {
    deltas: Vec<f64>,
}

impl IncrementSeries {
    /// Wraps raw increments, rejecting non-finite entries.
    pub fn from_deltas(deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::TooShort { min: 1, got: 0 });
        }
        if let Some((index, &value)) = deltas.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { deltas })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.deltas
    }
}

impl AsRef<[f64]> for IncrementSeries {
    fn as_ref(&self) -> &[f64] {
        &self.deltas
    }
}

/// Checks `2 <= k <= n/2`.
///
/// Returns a warning string when `k` falls outside the guidance band
/// `[n^{1/3}, n^{3/4}]`; such block lengths are legal but the limit theory
/// is unlikely to be accurate for them.
pub fn validate_block_config(n: usize, k: usize) -> Result<Option<String>> {
    if k < 2 {
        return Err(Error::BlockTooSmall { k });
    }
    if k > n / 2 {
        return Err(Error::BlockTooLarge { n, k });
    }
    let nf = n as f64;
    let (lo, hi) = (nf.powf(1.0 / 3.0), nf.powf(0.75));
    let kf = k as f64;
    if kf < lo || kf > hi {
        return Ok(Some(format!(
            "block length k={k} lies outside the guidance band [{lo:.1}, {hi:.1}] for n={n}"
        )));
    }
    Ok(None)
}
