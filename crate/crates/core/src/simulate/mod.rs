//! Seeded path generators: Euler schemes for log prices driven by constant,
//! seasonal stochastic, fractional OU log- and user-supplied volatilities,
//! with optional volatility and price jumps.
//!
//! Each source of randomness draws from its own ChaCha stream of the scenario
//! seed, so adding price jumps to a scenario leaves its Brownian path intact.

pub mod fbm;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::LogPriceSeries;

pub use fbm::{fbm_covariance, simulate_fbm_cholesky, MAX_FBM_GRID};

const STREAM_PRICE_BM: u64 = 0;
const STREAM_VOL_BM: u64 = 1;
const STREAM_FBM: u64 = 2;
const STREAM_JUMPS: u64 = 3;

/// ChaCha8 generator for `(seed, stream)`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of replication `index` in a study seeded with `base` (SplitMix64
/// finalizer over the pair, so neighbouring indices decorrelate).
pub fn replication_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Intraday seasonality `v_t = 1 - 0.2 sin(3πt/4)`.
pub fn seasonality(t: f64) -> f64 {
    1.0 - 0.2 * (0.75 * PI * t).sin()
}

/// Mean reversion and vol-of-vol of the fractional OU log-volatility.
pub const FOU_REVERSION: f64 = 0.1;
pub const FOU_VOL_OF_VOL: f64 = 0.1;

/// Semimartingale volatility `σ_t = (1 + M_t) v_t`, where
/// `M_t = ∫ c ρ dW + ∫ c sqrt(1 - ρ²) dW⊥` shares `W` with the price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonalSv {
    pub c: f64,
    pub rho: f64,
}

impl Default for SeasonalSv {
    fn default() -> Self {
        Self { c: 0.1, rho: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolModel {
    Constant {
        sigma: f64,
    },
    SeasonalSv(SeasonalSv),
    /// `σ = σ̃ v` with `d log σ̃ = -0.1 log σ̃ dt + 0.1 dB^H`, `σ̃_0 = 1`.
    FractionalOuLogVol {
        hurst: f64,
    },
    /// Seasonal SV up to `switch_time`, fractional OU log-volatility (started
    /// at the current level) afterwards.
    SvThenFractional {
        switch_time: f64,
        hurst: f64,
    },
    /// `levels[j]` applies from `breaks[j-1]` (or 0) up to `breaks[j]`.
    PiecewiseConstant {
        breaks: Vec<f64>,
        levels: Vec<f64>,
    },
    /// Left-endpoint volatilities `σ_{i/n}`, `i = 0..n`.
    UserPath {
        sigma: Vec<f64>,
    },
}

/// Additive volatility jump: `σ_t += size` for `t >= time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolJump {
    pub time: f64,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum JumpCount {
    Fixed(usize),
    Poisson(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "times", rename_all = "snake_case")]
pub enum JumpArrival {
    Uniform,
    Fixed(Vec<f64>),
}

/// Compound-Poisson price jumps with `N(mean, variance)` sizes.
/// Fixed arrival times override the count law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceJumpSpec {
    pub count: JumpCount,
    pub size_mean: f64,
    pub size_variance: f64,
    pub arrival: JumpArrival,
}

impl PriceJumpSpec {
    /// One jump at a uniform time with `N(0.5, 0.1)` size.
    pub fn uniform_default() -> Self {
        Self {
            count: JumpCount::Fixed(1),
            size_mean: 0.5,
            size_variance: 0.1,
            arrival: JumpArrival::Uniform,
        }
    }

    /// One `N(0.5, 0.1)` jump at a fixed time.
    pub fn at(time: f64) -> Self {
        Self {
            count: JumpCount::Fixed(1),
            size_mean: 0.5,
            size_variance: 0.1,
            arrival: JumpArrival::Fixed(vec![time]),
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.size_mean.is_finite() || !(self.size_variance >= 0.0) || !self.size_variance.is_finite() {
            return Err(Error::Config(
                "price jump size law needs finite mean and variance >= 0".into(),
            ));
        }
        if let JumpCount::Poisson(l) = self.count {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::Config(format!("Poisson intensity {l} is invalid")));
            }
        }
        if let JumpArrival::Fixed(times) = &self.arrival {
            if times.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
                return Err(Error::Config("fixed jump times must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Full simulation recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathScenario {
    pub n: usize,
    pub drift: f64,
    pub x0: f64,
    pub vol_model: VolModel,
    pub vol_jump: Option<VolJump>,
    pub price_jumps: Vec<PriceJumpSpec>,
    pub seed: u64,
}

impl PathScenario {
    /// Driftless constant-volatility Brownian motion started at 0.
    pub fn brownian(n: usize, sigma: f64, seed: u64) -> Self {
        Self {
            n,
            drift: 0.0,
            x0: 0.0,
            vol_model: VolModel::Constant { sigma },
            vol_jump: None,
            price_jumps: Vec::new(),
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooShort { min: 2, got: self.n });
        }
        if !self.drift.is_finite() || !self.x0.is_finite() {
            return Err(Error::Config("drift and start value must be finite".into()));
        }
        let check_h = |h: f64| {
            if h > 0.0 && h < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("hurst parameter {h} is not in (0, 1)")))
            }
        };
        let check_theta = |t: f64| {
            if t > 0.0 && t < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("change time {t} is not in (0, 1)")))
            }
        };
        match &self.vol_model {
            VolModel::Constant { sigma } => {
                if !(*sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::Config(format!("constant volatility {sigma} must be positive")));
                }
            }
            VolModel::SeasonalSv(sv) => {
                if !(sv.rho.abs() <= 1.0) || !sv.c.is_finite() {
                    return Err(Error::Config("seasonal SV needs |rho| <= 1 and finite c".into()));
                }
            }
            VolModel::FractionalOuLogVol { hurst } => check_h(*hurst)?,
            VolModel::SvThenFractional { switch_time, hurst } => {
                check_h(*hurst)?;
                check_theta(*switch_time)?;
            }
            VolModel::PiecewiseConstant { breaks, levels } => {
                if levels.len() != breaks.len() + 1 {
                    return Err(Error::Config(
                        "piecewise volatility needs one more level than breaks".into(),
                    ));
                }
                if levels.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
                    return Err(Error::Config("piecewise volatility levels must be positive".into()));
                }
                for b in breaks {
                    check_theta(*b)?;
                }
                if breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("volatility breaks must increase".into()));
                }
            }
            VolModel::UserPath { sigma } => {
                if sigma.len() != self.n {
                    return Err(Error::Config(format!(
                        "user volatility path has {} points, expected n = {}",
                        sigma.len(),
                        self.n
                    )));
                }
                if sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
                    return Err(Error::Config("user volatility must be finite and non-negative".into()));
                }
            }
        }
        if let Some(j) = &self.vol_jump {
            check_theta(j.time)?;
            if !j.size.is_finite() {
                return Err(Error::Config("volatility jump size must be finite".into()));
            }
        }
        for spec in &self.price_jumps {
            spec.validate()?;
        }
        Ok(())
    }
}

/// Simulated log-price path with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedPath {
    pub prices: LogPriceSeries,
    /// `σ_{i/n}`, `i = 0..n`; the `i`-th entry drives increment `i + 1`.
    pub vol_path: Vec<f64>,
    pub true_change_points: Vec<f64>,
    /// `(grid index, size)` of every price jump.
    pub price_jumps: Vec<(usize, f64)>,
}

/// Smallest grid index `i` with `i / n >= t`.
fn first_index_at_or_after(t: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut i = (t * nf).ceil() as usize;
    // guard against t * n landing a hair above an integer
    while i > 0 && (i - 1) as f64 / nf >= t {
        i -= 1;
    }
    i.min(n)
}

/// Euler scheme of the fractional OU log-volatility on grid points
/// `start..start + increments.len()`, returning `σ = σ̃ v` at each point.
///
/// `log_start` is `log σ̃` at grid point `start`; `fbm_increments[j]`
/// drives the step from `start + j` to `start + j + 1`.
pub fn fou_logvol_euler(log_start: f64, fbm_increments: &[f64], start: usize, n: usize) -> Vec<f64> {
    let dt = 1.0 / n as f64;
    let mut log_sigma = log_start;
    let mut out = Vec::with_capacity(fbm_increments.len());
    for (j, db) in fbm_increments.iter().enumerate() {
        out.push(log_sigma.exp() * seasonality((start + j) as f64 * dt));
        log_sigma += -FOU_REVERSION * log_sigma * dt + FOU_VOL_OF_VOL * db;
    }
    out
}

/// Fractional OU log-volatility path `σ_{i/n}`, `i = 0..n`, with `σ̃_0 = 1`.
pub fn simulate_fou_logvol(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng_stream(seed, STREAM_FBM);
    let inc = fbm::fbm_increments(n, 1.0 / n as f64, hurst, &mut rng)?;
    Ok(fou_logvol_euler(0.0, &inc, 0, n))
}

/// Draws price jumps and snaps them to the nearest grid point in `1..=n`.
pub fn simulate_price_jumps<R: Rng + ?Sized>(spec: &PriceJumpSpec, n: usize, rng: &mut R) -> Result<Vec<(usize, f64)>> {
    spec.validate()?;
    let size_law = Normal::new(spec.size_mean, spec.size_variance.sqrt()).map_err(|e| Error::Config(e.to_string()))?;
    let times: Vec<f64> = match &spec.arrival {
        JumpArrival::Fixed(t) => t.clone(),
        JumpArrival::Uniform => {
            let count = match spec.count {
                JumpCount::Fixed(c) => c,
                JumpCount::Poisson(l) if l == 0.0 => 0,
                JumpCount::Poisson(l) => {
                    Poisson::new(l).map_err(|e| Error::Config(e.to_string()))?.sample(rng) as usize
                }
            };
            (0..count).map(|_| rng.random::<f64>()).collect()
        }
    };
    let nf = n as f64;
    Ok(times
        .into_iter()
        .map(|t| {
            let idx = ((t * nf).round() as usize).clamp(1, n);
            (idx, size_law.sample(rng))
        })
        .collect())
}

/// Euler scheme `X_{i+1} = X_i + a/n + σ_i ΔW_{i+1} + J_{i+1}` on the grid.
pub fn simulate_ito(scenario: &PathScenario) -> Result<SimulatedPath> {
    scenario.validate()?;
    let n = scenario.n;
    let nf = n as f64;
    let dt = 1.0 / nf;
    let sqrt_dt = dt.sqrt();

    let mut price_rng = rng_stream(scenario.seed, STREAM_PRICE_BM);
    let dw: Vec<f64> = (0..n)
        .map(|_| sqrt_dt * price_rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut change_points = Vec::new();
    let mut sigma: Vec<f64> = match &scenario.vol_model {
        VolModel::Constant { sigma } => vec![*sigma; n],
        VolModel::SeasonalSv(sv) => seasonal_sv_path(sv, &dw, scenario.seed, n),
        VolModel::FractionalOuLogVol { hurst } => {
            let mut rng = rng_stream(scenario.seed, STREAM_FBM);
            let inc = fbm::fbm_increments(n, dt, *hurst, &mut rng)?;
            fou_logvol_euler(0.0, &inc, 0, n)
        }
        VolModel::SvThenFractional { switch_time, hurst } => {
            let sv = SeasonalSv::default();
            let mut path = seasonal_sv_path(&sv, &dw, scenario.seed, n);
            let start = first_index_at_or_after(*switch_time, n);
            if start < n {
                let mut rng = rng_stream(scenario.seed, STREAM_FBM);
                let inc = fbm::fbm_increments(n - start, dt, *hurst, &mut rng)?;
                let level = path[start] / seasonality(start as f64 * dt);
                let tail = fou_logvol_euler(level.ln(), &inc, start, n);
                path[start..].copy_from_slice(&tail);
            }
            change_points.push(*switch_time);
            path
        }
        VolModel::PiecewiseConstant { breaks, levels } => {
            change_points.extend_from_slice(breaks);
            (0..n)
                .map(|i| {
                    let t = i as f64 * dt;
                    levels[breaks.iter().take_while(|b| t >= **b).count()]
                })
                .collect()
        }
        VolModel::UserPath { sigma } => sigma.clone(),
    };

    if let Some(jump) = scenario.vol_jump {
        let from = first_index_at_or_after(jump.time, n);
        for s in &mut sigma[from..] {
            *s += jump.size;
        }
        change_points.push(jump.time);
    }
    change_points.sort_by(|a, b| a.total_cmp(b));

    let mut jump_rng = rng_stream(scenario.seed, STREAM_JUMPS);
    let mut jumps = Vec::new();
    for spec in &scenario.price_jumps {
        jumps.extend(simulate_price_jumps(spec, n, &mut jump_rng)?);
    }

    let mut deltas: Vec<f64> = sigma
        .iter()
        .zip(&dw)
        .map(|(s, w)| scenario.drift * dt + s * w)
        .collect();
    for &(idx, size) in &jumps {
        deltas[idx - 1] += size;
    }

    Ok(SimulatedPath {
        prices: LogPriceSeries::from_increments(scenario.x0, &deltas)?,
        vol_path: sigma,
        true_change_points: change_points,
        price_jumps: jumps,
    })
}

fn seasonal_sv_path(sv: &SeasonalSv, dw: &[f64], seed: u64, n: usize) -> Vec<f64> {
    let dt = 1.0 / n as f64;
    let sqrt_dt = dt.sqrt();
    let mut vol_rng = rng_stream(seed, STREAM_VOL_BM);
    let orth = (1.0 - sv.rho * sv.rho).sqrt();
    let mut m = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for (i, w) in dw.iter().enumerate() {
        // |1 + M| keeps the path positive; M has standard deviation c <= 0.1 on [0, 1]
        out.push((1.0 + m).abs() * seasonality(i as f64 * dt));
        let w_perp = sqrt_dt * vol_rng.sample::<f64, _>(StandardNormal);
        m += sv.c * sv.rho * w + sv.c * orth * w_perp;
    }
    out
}

/// Named simulation designs reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    SvNull,
    SvJump,
    FouNull,
    FouJump,
    GlobalNull,
    GlobalAlt,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::SvNull,
        Preset::SvJump,
        Preset::FouNull,
        Preset::FouJump,
        Preset::GlobalNull,
        Preset::GlobalAlt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SvNull => "sv-null",
            Preset::SvJump => "sv-jump",
            Preset::FouNull => "fou-null",
            Preset::FouJump => "fou-jump",
            Preset::GlobalNull => "global-null",
            Preset::GlobalAlt => "global-alt",
        }
    }

    /// Whether the preset satisfies the no-change hypothesis of its test.
    pub fn is_null(self) -> bool {
        matches!(self, Preset::SvNull | Preset::FouNull | Preset::GlobalNull)
    }

    /// Whether the preset targets the global (regularity) test.
    pub fn is_global(self) -> bool {
        matches!(self, Preset::GlobalNull | Preset::GlobalAlt)
    }

    /// Scenario with the default volatility-jump size of 0.2.
    pub fn scenario(self, n: usize, seed: u64) -> PathScenario {
        self.scenario_with_jump(n, seed, 0.2)
    }

    /// Scenario where `vol_jump_size` replaces 0.2 in the jump presets.
    ///
    /// All presets start at `X_0 = 4` with drift 0.1. The local-test presets
    /// carry one uniformly timed `N(0.5, 0.1)` price jump; their alternatives
    /// add a volatility jump at 2/3 together with a common price jump there.
    /// The global presets are jump-free, and `global-alt` switches to a
    /// fractional OU log-volatility with `H = 0.15` at 1/2.
    pub fn scenario_with_jump(self, n: usize, seed: u64, vol_jump_size: f64) -> PathScenario {
        let theta = 2.0 / 3.0;
        let local_vol = |fou: bool| {
            if fou {
                VolModel::FractionalOuLogVol { hurst: 0.2 }
            } else {
                VolModel::SeasonalSv(SeasonalSv::default())
            }
        };
        let (vol_model, vol_jump, price_jumps) = match self {
            Preset::SvNull | Preset::FouNull => (
                local_vol(self == Preset::FouNull),
                None,
                vec![PriceJumpSpec::uniform_default()],
            ),
            Preset::SvJump | Preset::FouJump => (
                local_vol(self == Preset::FouJump),
                Some(VolJump {
                    time: theta,
                    size: vol_jump_size,
                }),
                vec![PriceJumpSpec::uniform_default(), PriceJumpSpec::at(theta)],
            ),
            Preset::GlobalNull => (VolModel::SeasonalSv(SeasonalSv::default()), None, vec![]),
            Preset::GlobalAlt => (
                VolModel::SvThenFractional {
                    switch_time: 0.5,
                    hurst: 0.15,
                },
                None,
                vec![],
            ),
        };
        PathScenario {
            n,
            drift: 0.1,
            x0: 4.0,
            vol_model,
            vol_jump,
            price_jumps,
            seed,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario preset `{s}`")))
    }
}
