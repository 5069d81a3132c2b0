//! Location of volatility jumps: the scan statistic `V◇`, the single
//! change-point estimator and sequential top-down detection of several
//! change points.

use serde::{Deserialize, Serialize};

use crate::blockstats::TruncationRule;
use crate::error::{Error, Result};
use crate::local_test::{diamond_bandwidth, diamond_threshold, rolling_windows, LocalTestConfig};

/// `V◇_i = k^{-1/2} |Σ_{j=i-k+1..i} n(Δ_j X)² - Σ_{j=i+1..i+k} n(Δ_j X)²|`
/// for `i = k..=n-k`; entries outside that range are 0. The returned vector
/// is indexed by the split `i = 0..=n`.
pub fn v_diamond_series(increments: &[f64], k: usize, truncation: Option<TruncationRule>) -> Result<Vec<f64>> {
    let n = increments.len();
    let roll = rolling_windows(increments, k, truncation)?;
    let mut out = vec![0.0; n + 1];
    let root_k = (k as f64).sqrt();
    for i in roll.splits() {
        // k * (window RV) is the window sum of n(ΔX)²
        out[i] = root_k * (roll.left(i) - roll.right(i)).abs();
    }
    Ok(out)
}

/// `θ̂ = argmax_i V◇_i / n` (smallest `i` on ties), with the split index.
pub fn estimate_single(increments: &[f64], k: usize, truncation: Option<TruncationRule>) -> Result<(f64, usize)> {
    let n = increments.len();
    let v = v_diamond_series(increments, k, truncation)?;
    let i = first_max(k..=n - k, &v).expect("k <= n/2 leaves at least one split");
    Ok((i as f64 / n as f64, i))
}

fn first_max<I: IntoIterator<Item = usize>>(splits: I, v: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in splits {
        if best.is_none_or(|b| v[i] > v[b]) {
            best = Some(i);
        }
    }
    best
}

/// One detection round: the ψ◇ statistic over the current index set and,
/// if it rejected, the estimated split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub estimate_index: Option<usize>,
}

/// A maximal run of retained observation indices `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanRun {
    pub start: usize,
    pub end: usize,
    /// Runs shorter than `2k` increments hold no complete window and are
    /// ignored by the tests.
    pub testable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointResult {
    pub theta_hats: Vec<f64>,
    /// Split indices of the estimates, sorted.
    pub indices: Vec<usize>,
    pub clean_indices: Vec<CleanRun>,
    pub iterations: usize,
    pub rounds: Vec<RoundReport>,
    pub k_diamond: usize,
    pub radius: usize,
}

pub const MAX_DETECTION_ROUNDS: usize = 50;

/// Sequential top-down detection.
///
/// Each round runs ψ◇ on the windows lying entirely inside the retained
/// observations; on rejection the `V◇` argmax (configured `k`) over admissible
/// splits is recorded and observations within `r` of it are removed. The
/// default radius is `4k`; `k <= r <= n/4` is required.
pub fn detect_multiple(increments: &[f64], config: &LocalTestConfig, r: Option<usize>) -> Result<ChangePointResult> {
    let n = increments.len();
    config.validate(n)?;
    let k = config.block.k;
    let r = r.unwrap_or(4 * k);
    if r < k || r > n / 4 {
        return Err(Error::Config(format!(
            "separation radius r={r} must satisfy k={k} <= r <= n/4={}",
            n / 4
        )));
    }
    let trunc = config.block.truncation;
    let kd = diamond_bandwidth(n, config.regularity_a, config.lipschitz_l)?;
    let threshold = diamond_threshold(kd, n / kd, config.c_diamond);
    let roll_d = rolling_windows(increments, kd, trunc)?;
    let scan = v_diamond_series(increments, k, trunc)?;

    let mut retained = vec![true; n + 1];
    let mut indices = Vec::new();
    let mut rounds = Vec::new();
    loop {
        if rounds.len() == MAX_DETECTION_ROUNDS {
            return Err(Error::MaxIterations {
                cap: MAX_DETECTION_ROUNDS,
            });
        }
        let admissible_d = admissible_splits(&retained, kd);
        let mut stat = 0.0f64;
        for &i in &admissible_d {
            let right = roll_d.right(i);
            if right == 0.0 {
                return Err(Error::ZeroDenominator { index: i });
            }
            stat = stat.max((roll_d.left(i) / right - 1.0).abs());
        }
        let reject = !admissible_d.is_empty() && stat >= threshold;
        let estimate = if reject {
            first_max(admissible_splits(&retained, k), &scan)
        } else {
            None
        };
        rounds.push(RoundReport {
            statistic: stat,
            threshold,
            reject,
            estimate_index: estimate,
        });
        let Some(i) = estimate else { break };
        indices.push(i);
        for flag in &mut retained[i.saturating_sub(r)..=(i + r).min(n)] {
            *flag = false;
        }
    }

    indices.sort_unstable();
    Ok(ChangePointResult {
        theta_hats: indices.iter().map(|i| *i as f64 / n as f64).collect(),
        indices,
        clean_indices: clean_runs(&retained, k),
        iterations: rounds.len(),
        rounds,
        k_diamond: kd,
        radius: r,
    })
}

/// Splits `i` whose windows `i-k..=i+k` (observation indices) are fully retained.
fn admissible_splits(retained: &[bool], k: usize) -> Vec<usize> {
    let n = retained.len() - 1;
    let mut out = Vec::new();
    let mut run = 0usize;
    // run = number of consecutive retained observations ending at j
    for j in 0..=n {
        run = if retained[j] { run + 1 } else { 0 };
        if run > 2 * k {
            out.push(j - k);
        }
    }
    out
}

fn clean_runs(retained: &[bool], k: usize) -> Vec<CleanRun> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, &keep) in retained.iter().enumerate() {
        match (keep, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                out.push(CleanRun {
                    start: s,
                    end: j - 1,
                    testable: j - 1 - s >= 2 * k,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let end = retained.len() - 1;
        out.push(CleanRun {
            start: s,
            end,
            testable: end - s >= 2 * k,
        });
    }
    out
}
