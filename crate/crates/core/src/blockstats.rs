//! Local realized volatilities over blocks of `k` increments, their truncated
//! versions, spot quarticity and the global quarticity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::series::validate_block_config;

/// Jump truncation level `u_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TruncationRule {
    Explicit {
        u: f64,
    },
    /// `u_n = C sqrt(2 ln n) / sqrt(n)` for `tau = 1/2`, `C n^{-tau}` otherwise.
    Scaled {
        c: f64,
        tau: f64,
    },
}

impl TruncationRule {
    pub fn scaled(c: f64) -> Self {
        TruncationRule::Scaled { c, tau: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationRule::Explicit { u } if u > 0.0 => Ok(()),
            TruncationRule::Explicit { u } => Err(Error::Config(format!("truncation level {u} must be positive"))),
            TruncationRule::Scaled { c, tau } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::Config(format!("truncation constant {c} must be positive")));
                }
                if !(tau > 0.0 && tau <= 0.5) {
                    return Err(Error::Config(format!("truncation exponent {tau} is not in (0, 1/2]")));
                }
                Ok(())
            }
        }
    }

    /// Threshold for a series of `n` increments.
    pub fn threshold(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            TruncationRule::Explicit { u } => u,
            TruncationRule::Scaled { c, tau } if tau == 0.5 => c * (2.0 * nf.ln()).sqrt() / nf.sqrt(),
            TruncationRule::Scaled { c, tau } => c * nf.powf(-tau),
        }
    }
}

/// Heuristic truncation constant: three sample standard deviations of
/// `sqrt(n) ΔX`. Not backed by theory; users with a calibrated `C` should
/// pass it explicitly.
pub fn default_truncation_constant(increments: &[f64]) -> f64 {
    let n = increments.len() as f64;
    let scaled: Vec<f64> = increments.iter().map(|d| d * n.sqrt()).collect();
    let mean = compensated_sum(scaled.iter().copied()) / n;
    let var = compensated_sum(scaled.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0).max(1.0);
    3.0 * var.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    NonOverlapping,
    Overlapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    pub k: usize,
    pub truncation: Option<TruncationRule>,
    pub alignment: Alignment,
}

impl BlockConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            truncation: None,
            alignment: Alignment::Overlapping,
        }
    }

    pub fn truncated(mut self, rule: TruncationRule) -> Self {
        self.truncation = Some(rule);
        self
    }

    pub fn with_alignment(mut self, alignment: Alignment) -> Self {
        self.alignment = alignment;
        self
    }

    /// Checks the block length against `n`; returns the guidance warning, if any.
    pub fn validate(&self, n: usize) -> Result<Option<String>> {
        if let Some(rule) = &self.truncation {
            rule.validate()?;
        }
        validate_block_config(n, self.k)
    }

    /// Truncation threshold for `n` increments (`+inf` without truncation).
    pub fn threshold(&self, n: usize) -> f64 {
        self.truncation.map_or(f64::INFINITY, |r| r.threshold(n))
    }
}

#[inline]
fn retained_square(d: f64, u: f64) -> f64 {
    if d.abs() <= u {
        d * d
    } else {
        0.0
    }
}

/// `RV_{n,i} = (n/k) Σ_{j=1..k} (Δ_{ik+j} X)²`, `i = 0..floor(n/k)`.
/// Increments past the last full block are ignored.
pub fn local_rv(increments: &[f64], k: usize) -> Result<Vec<f64>> {
    validate_block_config(increments.len(), k)?;
    Ok(block_sums(increments, k, f64::INFINITY).0)
}

/// Truncated local realized volatility: squares of increments above `u` are
/// dropped. Errors if some block loses every increment.
pub fn local_trv(increments: &[f64], k: usize, u: f64) -> Result<Vec<f64>> {
    validate_block_config(increments.len(), k)?;
    let (values, all_cut) = block_sums(increments, k, u);
    if let Some(block) = all_cut {
        return Err(Error::AllTruncated { block, threshold: u });
    }
    Ok(values)
}

/// Block statistics as configured (truncated iff the config carries a rule).
pub fn local_block_rv(increments: &[f64], config: &BlockConfig) -> Result<Vec<f64>> {
    config.validate(increments.len())?;
    match config.truncation {
        None => local_rv(increments, config.k),
        Some(r) => local_trv(increments, config.k, r.threshold(increments.len())),
    }
}

fn block_sums(increments: &[f64], k: usize, u: f64) -> (Vec<f64>, Option<usize>) {
    let n = increments.len();
    let scale = n as f64 / k as f64;
    let mut first_empty = None;
    let values = increments
        .chunks_exact(k)
        .enumerate()
        .map(|(i, block)| {
            if first_empty.is_none() && block.iter().all(|d| d.abs() > u) {
                first_empty = Some(i);
            }
            scale * compensated_sum(block.iter().map(|d| retained_square(*d, u)))
        })
        .collect();
    (values, first_empty)
}

/// Left and right overlapping window statistics at the splits `i = k..=n-k`.
///
/// `left(i) = (n/k) Σ_{j=i-k+1..i} (Δ_j X)²`, `right(i) = (n/k) Σ_{j=i+1..i+k} (Δ_j X)²`
/// (1-based increments, squares above the threshold dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct RollingRv {
    k: usize,
    n: usize,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl RollingRv {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Splits `k..=n-k` in order.
    pub fn splits(&self) -> std::ops::RangeInclusive<usize> {
        self.k..=self.n - self.k
    }

    pub fn left(&self, i: usize) -> f64 {
        self.left[i - self.k]
    }

    pub fn right(&self, i: usize) -> f64 {
        self.right[i - self.k]
    }

    pub fn left_values(&self) -> &[f64] {
        &self.left
    }

    pub fn right_values(&self) -> &[f64] {
        &self.right
    }
}

/// Window sums of `k` (truncated) squared increments at every split, by a
/// compensated sliding update in `O(n)`. `u = +inf` disables truncation.
pub fn rolling_rv(increments: &[f64], k: usize, u: f64) -> Result<RollingRv> {
    let n = increments.len();
    if k == 0 {
        return Err(Error::BlockTooSmall { k });
    }
    if k > n / 2 {
        return Err(Error::BlockTooLarge { n, k });
    }
    let sq: Vec<f64> = increments.iter().map(|d| retained_square(*d, u)).collect();
    let windows = window_sums(&sq, k);
    // windows[s] sums sq[s..s+k]; the left window of split i starts at i-k,
    // the right one at i.
    let scale = n as f64 / k as f64;
    let left = windows[..=n - 2 * k].iter().map(|w| scale * w).collect();
    let right = windows[k..].iter().map(|w| scale * w).collect();
    Ok(RollingRv { k, n, left, right })
}

/// Sums of every run of `k` consecutive entries, `out[s] = Σ values[s..s+k]`.
pub(crate) fn window_sums(values: &[f64], k: usize) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    for v in &values[..k] {
        acc.add(*v);
    }
    let mut out = Vec::with_capacity(values.len() - k + 1);
    out.push(acc.value());
    for s in k..values.len() {
        acc.add(values[s]);
        acc.add(-values[s - k]);
        out.push(acc.value());
    }
    out
}

/// Quarticity estimate `(2n/3) Σ (Δ_i X)⁴`, consistent for `2 ∫σ⁴`.
pub fn quarticity(increments: &[f64]) -> f64 {
    let n = increments.len() as f64;
    2.0 * n / 3.0 * compensated_sum(increments.iter().map(|d| d.powi(4)))
}

/// Spot fourth-moment estimates `σ̂⁴ = (n²/(3K)) Σ_{j=i-K+1..i} (Δ_j X)⁴`
/// at increment indices `i = K..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpotQuarticity {
    window: usize,
    values: Vec<f64>,
}

impl SpotQuarticity {
    pub fn window(&self) -> usize {
        self.window
    }

    /// Estimate at 1-based increment index `i`, `K <= i <= n`.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i - self.window]
    }

    /// Estimates for `i = K..=n` in order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn spot_vol_quartic(increments: &[f64], window: usize) -> Result<SpotQuarticity> {
    let n = increments.len();
    if window == 0 || window > n {
        return Err(Error::WindowTooLarge { n, window });
    }
    let nf = n as f64;
    let scale = nf * nf / (3.0 * window as f64);
    let fourth: Vec<f64> = increments.iter().map(|d| d.powi(4)).collect();
    let values = window_sums(&fourth, window).into_iter().map(|s| scale * s).collect();
    Ok(SpotQuarticity { window, values })
}
