//! The two limit laws behind the critical values: the Gumbel-type law of the
//! rescaled local maxima and the Kolmogorov-Smirnov law of the Brownian
//! bridge supremum.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `P(V <= x) = exp(-exp(-x) / sqrt(pi))`.
pub fn ev_cdf(x: f64) -> f64 {
    (-(-x).exp() / PI.sqrt()).exp()
}

/// Closed-form inverse of [`ev_cdf`]: `-ln(-sqrt(pi) ln p)`.
pub fn ev_quantile(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(-(-PI.sqrt() * p.ln()).ln())
}

const KS_TERM_TOL: f64 = 1e-14;
const KS_MAX_TERMS: usize = 100;

/// CDF of `sup_t |B_t - t B_1|`.
///
/// For `x >= 1` the alternating series `1 - 2 sum (-1)^{k+1} exp(-2k^2x^2)` is
/// summed until the next term drops below 1e-14 (its truncation error is
/// bounded by the first omitted term). Below 1 that series converges too
/// slowly, so the equivalent theta-function form
/// `sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8x^2))` is used instead.
pub fn ks_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1.0 {
        let mut sum = 0.0;
        for k in 1..=KS_MAX_TERMS {
            let odd = (2 * k - 1) as f64;
            let term = (-odd * odd * PI * PI / (8.0 * x * x)).exp();
            sum += term;
            if term < KS_TERM_TOL * sum.max(f64::MIN_POSITIVE) || term == 0.0 {
                break;
            }
        }
        return ((2.0 * PI).sqrt() / x * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=KS_MAX_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        if term < KS_TERM_TOL {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Inverse of [`ks_cdf`] by bisection on `[0, 5]`.
pub fn ks_quantile(p: f64) -> Result<f64> {
    check_probability(p)?;
    let (mut lo, mut hi) = (0.0f64, 5.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ks_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability {p} is not in (0, 1)")))
    }
}
