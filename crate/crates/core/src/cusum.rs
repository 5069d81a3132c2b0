//! Self-normalized cusum test of constant volatility against structural
//! breaks, with the Kolmogorov-Smirnov limit law.

use crate::blockstats::quarticity;
use crate::distributions::{ks_cdf, ks_quantile};
use crate::error::{Error, Result};
use crate::numeric::{argmax_first, compensated_sum, CompensatedSum};
use crate::report::{CriticalSource, TestReport};

#[derive(Debug, Clone, PartialEq)]
pub struct CusumPath {
    /// `S_{n,m}` for `m = 1..=n` (entry `m - 1`).
    pub s: Vec<f64>,
    pub gamma_hat_sq: f64,
}

/// `S_{n,m} = n^{-1/2} Σ_{i<=m} (n (Δ_i X)² - Σ_j (Δ_j X)²)`.
pub fn cusum_path(increments: &[f64]) -> Result<CusumPath> {
    let n = increments.len();
    if n < 2 {
        return Err(Error::TooShort { min: 2, got: n });
    }
    let nf = n as f64;
    let total = compensated_sum(increments.iter().map(|d| d * d));
    let scale = nf.sqrt().recip();
    let mut acc = CompensatedSum::new();
    let s = increments
        .iter()
        .map(|d| {
            acc.add(nf * d * d);
            acc.add(-total);
            scale * acc.value()
        })
        .collect();
    Ok(CusumPath {
        s,
        gamma_hat_sq: quarticity(increments),
    })
}

/// `T_n = max_m |S_{n,m}| / γ̂`, rejected against the KS quantile. The
/// reported argmax is the break-location candidate `m`.
pub fn test_constant_vol(increments: &[f64], level: f64) -> Result<TestReport> {
    check_level(level)?;
    let path = cusum_path(increments)?;
    if !(path.gamma_hat_sq > 0.0) {
        return Err(Error::DegenerateQuarticity);
    }
    let abs: Vec<f64> = path.s.iter().map(|v| v.abs()).collect();
    let (idx, max) = argmax_first(&abs).expect("cusum path is non-empty");
    let t = max / path.gamma_hat_sq.sqrt();
    let critical = ks_quantile(1.0 - level)?;
    Ok(TestReport {
        test: "parametric".into(),
        raw_stat: max,
        rescaled_stat: t,
        critical_value: critical,
        p_value: Some(1.0 - ks_cdf(t)),
        decision: t > critical,
        level,
        critical_source: CriticalSource::LimitLaw,
        argmax_index: Some(idx + 1),
        warnings: Vec::new(),
    })
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("test level {level} is not in (0, 1)")))
    }
}
