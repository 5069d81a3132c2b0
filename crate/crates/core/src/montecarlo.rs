//! Parallel Monte Carlo studies of size, power and null laws.
//!
//! Replication `r` of a study seeded with `s` simulates its path from
//! `replication_seed(s, r)` and its bootstrap from a seed derived from that,
//! so tables are identical for any worker count.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockstats::{BlockConfig, TruncationRule};
use crate::distributions::{ev_cdf, ev_quantile, ks_cdf, ks_quantile};
use crate::error::{Error, Result};
use crate::global_test::{bootstrap_sample, cusum_q, dagger_scale, standardized_vbar, GlobalTestConfig};
use crate::local_test::{rescaled_statistic, wild_bootstrap_sample, LocalTestConfig};
use crate::numeric::{empirical_quantile, order_statistic_rank};
use crate::simulate::{replication_seed, simulate_ito, Preset};

/// Runs `f(0..reps)` on a pool of `workers` threads (`None` = all cores) and
/// returns the results in replication order.
pub fn run_replications<T, F>(reps: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..reps).into_par_iter().map(&f).collect()))
}

/// Seed of the bootstrap inside replication `r`.
pub fn bootstrap_seed(base: u64, r: usize) -> u64 {
    replication_seed(replication_seed(base, r as u64), 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub preset: Preset,
    pub n: usize,
    pub k: usize,
    pub spot_window: usize,
    pub reps: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    /// Bootstrap replications per Monte Carlo run (0 disables the bootstrap).
    pub bootstrap: usize,
    pub truncation: Option<TruncationRule>,
    /// Overrides the volatility-jump size of the jump presets.
    pub vol_jump_size: Option<f64>,
}

impl StudyConfig {
    /// Defaults: `k = floor(sqrt n)`, `K = floor(sqrt n)`, levels 1/5/10%,
    /// truncation `u_n = sqrt(2 ln n / n)` and no bootstrap.
    pub fn new(preset: Preset, n: usize, reps: usize, seed: u64) -> Self {
        let root = (n as f64).sqrt().floor() as usize;
        Self {
            preset,
            n,
            k: root,
            spot_window: root,
            reps,
            seed,
            levels: vec![0.01, 0.05, 0.10],
            bootstrap: 0,
            truncation: Some(TruncationRule::scaled(1.0)),
            vol_jump_size: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("a study needs at least one replication".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("a study needs at least one level".into()));
        }
        for l in &self.levels {
            if !(*l > 0.0 && *l < 1.0) {
                return Err(Error::Config(format!("test level {l} is not in (0, 1)")));
            }
        }
        Ok(())
    }
}

/// One Monte Carlo run: the limit-law statistic and, when requested, the
/// bootstrap statistic with its critical values at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub statistic: f64,
    pub bootstrap_statistic: Option<f64>,
    pub bootstrap_critical: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub scenario: String,
    pub statistic: String,
    pub critical_source: String,
    pub level: f64,
    pub rejection_rate: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfRow {
    pub quantile: f64,
    pub empirical: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub replications: Vec<Replication>,
    pub rates: Vec<RateRow>,
    /// Empirical CDF of the limit-law statistic against its limit (null presets only).
    pub ecdf: Vec<EcdfRow>,
}

fn one_replication(cfg: &StudyConfig, r: usize) -> Result<Replication> {
    let path_seed = replication_seed(cfg.seed, r as u64);
    let scenario = match cfg.vol_jump_size {
        Some(size) => cfg.preset.scenario_with_jump(cfg.n, path_seed, size),
        None => cfg.preset.scenario(cfg.n, path_seed),
    };
    let d = simulate_ito(&scenario)?.prices.increments().into_inner();
    let boot_seed = bootstrap_seed(cfg.seed, r);
    if cfg.preset.is_global() {
        let gcfg = GlobalTestConfig {
            spot_window: cfg.spot_window,
            bootstrap_b: cfg.bootstrap.max(1),
            seed: boot_seed,
            truncation: None,
            ..GlobalTestConfig::new(cfg.n, boot_seed)
        };
        gcfg.validate(cfg.n)?;
        let statistic = dagger_scale() * standardized_vbar(&d, cfg.spot_window)?.0;
        let (bootstrap_statistic, bootstrap_critical) = if cfg.bootstrap > 0 {
            let mut sample = bootstrap_sample(&d, &gcfg)?;
            let crit = cfg
                .levels
                .iter()
                .map(|l| empirical_quantile(&mut sample, 1.0 - l))
                .collect();
            (Some(dagger_scale() * cusum_q(&d)?.0), crit)
        } else {
            (None, Vec::new())
        };
        Ok(Replication {
            statistic,
            bootstrap_statistic,
            bootstrap_critical,
        })
    } else {
        let mut block = BlockConfig::new(cfg.k);
        block.truncation = cfg.truncation;
        let lcfg = LocalTestConfig::new(block);
        let statistic = rescaled_statistic(&d, &block)?.1;
        let bootstrap_critical = if cfg.bootstrap > 0 {
            let mut sample = wild_bootstrap_sample(&d, &lcfg, cfg.bootstrap, boot_seed)?;
            cfg.levels
                .iter()
                .map(|l| empirical_quantile(&mut sample, 1.0 - l))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Replication {
            statistic,
            bootstrap_statistic: (cfg.bootstrap > 0).then_some(statistic),
            bootstrap_critical,
        })
    }
}

/// Runs the study on `workers` threads.
pub fn run_study(cfg: &StudyConfig, workers: Option<usize>) -> Result<StudyResult> {
    cfg.validate()?;
    let replications: Vec<Replication> = run_replications(cfg.reps, workers, |r| one_replication(cfg, r))?
        .into_iter()
        .collect::<Result<_>>()?;
    let global = cfg.preset.is_global();
    let (stat_name, limit_cdf, limit_quantile): (&str, fn(f64) -> f64, fn(f64) -> Result<f64>) = if global {
        ("standardized_vbar", ks_cdf, ks_quantile)
    } else {
        ("rescaled_vstar", ev_cdf, ev_quantile)
    };
    let reps = replications.len();
    let mut rates = Vec::new();
    for (li, &level) in cfg.levels.iter().enumerate() {
        let crit = limit_quantile(1.0 - level)?;
        let hits = replications.iter().filter(|r| r.statistic > crit).count();
        rates.push(RateRow {
            scenario: cfg.preset.name().into(),
            statistic: stat_name.into(),
            critical_source: "limit_law".into(),
            level,
            rejection_rate: hits as f64 / reps as f64,
            reps,
        });
        if cfg.bootstrap > 0 {
            let hits = replications
                .iter()
                .filter(|r| r.bootstrap_statistic.is_some_and(|s| s > r.bootstrap_critical[li]))
                .count();
            rates.push(RateRow {
                scenario: cfg.preset.name().into(),
                statistic: if global { "scaled_vdagger" } else { "rescaled_vstar" }.into(),
                critical_source: "bootstrap".into(),
                level,
                rejection_rate: hits as f64 / reps as f64,
                reps,
            });
        }
    }
    let ecdf = if cfg.preset.is_null() {
        let stats: Vec<f64> = replications.iter().map(|r| r.statistic).collect();
        ecdf_table(&stats, limit_cdf)
    } else {
        Vec::new()
    };
    Ok(StudyResult {
        config: cfg.clone(),
        replications,
        rates,
        ecdf,
    })
}

/// Empirical CDF at the sample percentiles `p = 0.01..0.99`, next to the
/// limit CDF at the same points.
pub fn ecdf_table<F: Fn(f64) -> f64>(sample: &[f64], limit: F) -> Vec<EcdfRow> {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let len = sorted.len();
    let mut rows: Vec<EcdfRow> = Vec::new();
    for pct in 1..=99 {
        let x = sorted[order_statistic_rank(pct as f64 / 100.0, len) - 1];
        if rows.last().is_some_and(|r| r.quantile == x) {
            continue;
        }
        let below = sorted.partition_point(|v| *v <= x);
        rows.push(EcdfRow {
            quantile: x,
            empirical: below as f64 / len as f64,
            limit: limit(x),
        });
    }
    rows
}

/// Writes serializable rows as CSV with a header.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    }
    w.flush().map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    Ok(())
}
