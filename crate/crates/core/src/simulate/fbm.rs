//! Fractional Brownian motion on the grid `{i/n}` via the Cholesky factor of
//! the fractional Gaussian noise covariance.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;

use super::rng_stream;
use crate::error::{Error, Result};

/// Largest grid the dense factorization accepts (the factor alone takes
/// `n(n+1)/2` doubles, about 100 MB at the cap).
pub const MAX_FBM_GRID: usize = 5000;

const CACHE_SLOTS: usize = 3;

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Analytic fBm covariance `½(s^{2H} + t^{2H} - |t-s|^{2H})`.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2))
}

/// Lower Cholesky factor of the `n x n` covariance of unit-step fractional
/// Gaussian noise, stored packed row-major.
#[derive(Debug)]
pub struct FgnFactor {
    n: usize,
    hurst: f64,
    packed: Vec<f64>,
}

impl FgnFactor {
    fn compute(n: usize, hurst: f64) -> Result<Self> {
        let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(k, hurst)).collect();
        let mut packed = vec![0.0; n * (n + 1) / 2];
        for i in 0..n {
            let row_start = i * (i + 1) / 2;
            let (done, rest) = packed.split_at_mut(row_start);
            let row_i = &mut rest[..=i];
            for j in 0..=i {
                let row_j = if j < i {
                    &done[j * (j + 1) / 2..j * (j + 1) / 2 + j + 1]
                } else {
                    &[][..]
                };
                let s = if j < i {
                    gamma[i - j] - dot(&row_i[..j], &row_j[..j])
                } else {
                    gamma[0] - dot(&row_i[..i], &row_i[..i])
                };
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::CholeskyFailure { row: i, hurst });
                    }
                    row_i[i] = s.sqrt();
                } else {
                    row_i[j] = s / row_j[j];
                }
            }
        }
        Ok(Self { n, hurst, packed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Maps `n` i.i.d. standard normals to fBm increments over steps of
    /// length `step` (self-similarity scales unit-step noise by `step^H`).
    pub fn increments(&self, normals: &[f64], step: f64) -> Vec<f64> {
        assert_eq!(normals.len(), self.n, "need one normal per increment");
        let scale = step.powf(self.hurst);
        (0..self.n)
            .map(|i| {
                let start = i * (i + 1) / 2;
                scale * dot(&self.packed[start..=start + i], &normals[..=i])
            })
            .collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

type CacheKey = (usize, u64);

fn cache() -> &'static Mutex<VecDeque<(CacheKey, Arc<FgnFactor>)>> {
    static CACHE: OnceLock<Mutex<VecDeque<(CacheKey, Arc<FgnFactor>)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(VecDeque::new()))
}

/// Cholesky factor for `(n, hurst)`, computed once and kept in a small cache.
pub fn fgn_factor(n: usize, hurst: f64) -> Result<Arc<FgnFactor>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("hurst parameter {hurst} is not in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Domain("fBm grid needs at least one step".into()));
    }
    if n > MAX_FBM_GRID {
        return Err(Error::GridTooLarge { n, cap: MAX_FBM_GRID });
    }
    let key = (n, hurst.to_bits());
    // The lock is held while factorizing so concurrent callers do not
    // duplicate an O(n^3) computation.
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some((_, f)) = guard.iter().find(|(k, _)| *k == key) {
        return Ok(Arc::clone(f));
    }
    let factor = Arc::new(FgnFactor::compute(n, hurst)?);
    if guard.len() == CACHE_SLOTS {
        guard.pop_front();
    }
    guard.push_back((key, Arc::clone(&factor)));
    Ok(factor)
}

/// fBm increments over `steps` steps of length `step`, drawing normals from `rng`.
pub fn fbm_increments<R: Rng + ?Sized>(steps: usize, step: f64, hurst: f64, rng: &mut R) -> Result<Vec<f64>> {
    let factor = fgn_factor(steps, hurst)?;
    let normals: Vec<f64> = (0..steps).map(|_| rng.sample(StandardNormal)).collect();
    Ok(factor.increments(&normals, step))
}

/// fBm values `B^H_{i/n}`, `i = 0..=n` (so `B^H_0 = 0` leads the output).
pub fn simulate_fbm_cholesky(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng_stream(seed, 0);
    let inc = fbm_increments(n, 1.0 / n as f64, hurst, &mut rng)?;
    let mut path = Vec::with_capacity(n + 1);
    let mut b = 0.0;
    path.push(b);
    for d in inc {
        b += d;
        path.push(b);
    }
    Ok(path)
}
