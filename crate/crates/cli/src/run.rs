//! Command execution.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use volcp_core::blockstats::default_truncation_constant;
use volcp_core::cusum::test_constant_vol;
use volcp_core::global_test::test_global;
use volcp_core::local_test::test_vol_jump;
use volcp_core::montecarlo::{bootstrap_seed, run_study, write_csv, EcdfRow, RateRow, StudyConfig};
use volcp_core::simulate::simulate_ito;
use volcp_core::{
    detect_multiple, validate_block_config, BlockConfig, CriticalValueSource, GlobalMode, GlobalTestConfig,
    LocalTestConfig, LogPriceSeries, Preset, TruncationRule,
};

use crate::args::{
    Command, EstimateArgs, Format, GlobalModeArg, MonteCarloArgs, OutputArgs, SimulateArgs, SourceArgs, Stat, TestArgs,
    TruncArgs,
};
use crate::envelope::{Envelope, EstimateRow, PathRow, ReportRow, Resolved, Simulation, StudyTables};
use crate::CliError;

/// Runs one command and writes its output.
pub fn run(command: Command) -> Result<Envelope, CliError> {
    if let Some(w) = command.output().workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        // a pool installed by an earlier call in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let start = Instant::now();
    let mut env = Envelope::new(command.clone());
    let output = match &command {
        Command::Test(a) => cmd_test(a, &mut env)?,
        Command::Estimate(a) => cmd_estimate(a, &mut env)?,
        Command::Simulate(a) => cmd_simulate(a, &mut env)?,
        Command::Montecarlo(a) => cmd_montecarlo(a, &mut env)?,
    };
    env.elapsed_seconds = start.elapsed().as_secs_f64();
    let opts = command.output();
    match opts.format {
        Format::Json => emit(opts.out.as_deref(), |w| {
            serde_json::to_writer_pretty(&mut *w, &env).map_err(io::Error::from)?;
            writeln!(w)
        })?,
        Format::Csv => output.write(opts.out.as_deref())?,
    }
    Ok(env)
}

/// CSV payload of a command, written when `--format csv` is chosen.
enum CsvOutput {
    Reports(Vec<ReportRow>),
    Estimates(Vec<EstimateRow>),
    Path(Vec<PathRow>),
    Study {
        rates: Vec<RateRow>,
        ecdf: Vec<EcdfRow>,
        ecdf_path: Option<PathBuf>,
    },
}

impl CsvOutput {
    fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        match self {
            CsvOutput::Reports(rows) => emit_csv(out, rows),
            CsvOutput::Estimates(rows) => emit_csv(out, rows),
            CsvOutput::Path(rows) => emit_csv(out, rows),
            CsvOutput::Study { rates, ecdf, ecdf_path } => {
                emit_csv(out, rates)?;
                match ecdf_path {
                    Some(p) if !ecdf.is_empty() => emit_csv(Some(p), ecdf),
                    _ => Ok(()),
                }
            }
        }
    }
}

fn emit<F>(out: Option<&Path>, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn emit_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    emit(out, |w| w.write_all(&buf))
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage(format!("{what} is stochastic: pass --seed or set VOLCP_SEED")))
}

struct Loaded {
    increments: Vec<f64>,
    from_file: bool,
}

fn load(source: &SourceArgs, seed: Option<u64>) -> Result<Loaded, CliError> {
    if let Some(path) = &source.input {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let series = LogPriceSeries::from_csv(io::BufReader::new(file))?;
        return Ok(Loaded {
            increments: series.increments().into_inner(),
            from_file: true,
        });
    }
    let preset = source.scenario.expect("clap requires --input or --scenario");
    let seed = require_seed(seed, "simulating a scenario")?;
    let path = simulate_ito(&scenario(preset, source.n, seed, source.jump_size))?;
    Ok(Loaded {
        increments: path.prices.increments().into_inner(),
        from_file: false,
    })
}

fn scenario(preset: Preset, n: usize, seed: u64, jump_size: Option<f64>) -> volcp_core::PathScenario {
    match jump_size {
        Some(size) => preset.scenario_with_jump(n, seed, size),
        None => preset.scenario(n, seed),
    }
}

fn explicit_truncation(t: &TruncArgs) -> Option<TruncationRule> {
    match (t.trunc_u, t.trunc_c) {
        (Some(u), _) => Some(TruncationRule::Explicit { u }),
        (None, Some(c)) => Some(TruncationRule::scaled(c)),
        (None, None) => None,
    }
}

/// Truncation rule of the local statistics. Simulated presets default to
/// `C = 1`; input files fall back to a three-standard-deviation rule.
fn resolve_truncation(t: &TruncArgs, loaded: &Loaded, warnings: &mut Vec<String>) -> Result<TruncationRule, CliError> {
    if let Some(rule) = explicit_truncation(t) {
        rule.validate()?;
        return Ok(rule);
    }
    if t.jumps {
        return Err(CliError::Usage(
            "--jumps requires an explicit truncation rule (--trunc-c or --trunc-u)".into(),
        ));
    }
    if !loaded.from_file {
        return Ok(TruncationRule::scaled(1.0));
    }
    let n = loaded.increments.len() as f64;
    let u = default_truncation_constant(&loaded.increments) / n.sqrt();
    if !(u > 0.0) {
        return Err(CliError::Core(volcp_core::Error::DegenerateQuarticity));
    }
    warnings.push(format!(
        "no truncation rule given; using u = 3 sd of the increments = {u:e}. Pass --trunc-c or --trunc-u to override"
    ));
    Ok(TruncationRule::Explicit { u })
}

fn default_root(n: usize) -> usize {
    (n as f64).sqrt().floor() as usize
}

fn cmd_test(a: &TestArgs, env: &mut Envelope) -> Result<CsvOutput, CliError> {
    let loaded = load(&a.source, a.output.seed)?;
    let incr = &loaded.increments;
    let n = incr.len();
    env.resolved.n = n;
    env.resolved.seed = a.output.seed;
    let stats = if a.all {
        vec![Stat::Parametric, Stat::Local, Stat::Global]
    } else {
        vec![a.stat]
    };
    for stat in stats {
        let report = match stat {
            Stat::Parametric => test_constant_vol(incr, a.level)?,
            Stat::Local => {
                let k = a.k.unwrap_or_else(|| default_root(n));
                let rule = resolve_truncation(&a.trunc, &loaded, &mut env.warnings)?;
                env.resolved.k = Some(k);
                env.resolved.truncation = Some(rule);
                let mut cfg = LocalTestConfig::new(BlockConfig::new(k).truncated(rule));
                cfg.level = a.level;
                if let Some(b) = a.bootstrap {
                    let seed = require_seed(a.output.seed, "the wild bootstrap")?;
                    cfg.critical = CriticalValueSource::Bootstrap {
                        replications: b,
                        seed: bootstrap_seed(seed, 0),
                    };
                }
                test_vol_jump(incr, &cfg)?
            }
            Stat::Global => {
                let mut cfg = GlobalTestConfig::new(n, 0);
                if let Some(kk) = a.spot_window {
                    cfg.spot_window = kk;
                }
                env.resolved.spot_window = Some(cfg.spot_window);
                cfg.level = a.level;
                cfg.truncation = explicit_truncation(&a.trunc);
                match a.global_mode {
                    GlobalModeArg::Standardized => cfg.mode = GlobalMode::StandardizedKs,
                    GlobalModeArg::Bootstrap => {
                        let seed = require_seed(a.output.seed, "the global bootstrap test")?;
                        cfg.seed = bootstrap_seed(seed, 1);
                        if let Some(b) = a.bootstrap {
                            cfg.bootstrap_b = b;
                        }
                    }
                }
                test_global(incr, &cfg)?
            }
        };
        env.reports.push(report);
    }
    Ok(CsvOutput::Reports(env.reports.iter().map(ReportRow::from).collect()))
}

fn cmd_estimate(a: &EstimateArgs, env: &mut Envelope) -> Result<CsvOutput, CliError> {
    let loaded = load(&a.source, a.output.seed)?;
    let incr = &loaded.increments;
    let n = incr.len();
    let k = a.k.unwrap_or_else(|| default_root(n));
    let rule = resolve_truncation(&a.trunc, &loaded, &mut env.warnings)?;
    env.resolved.n = n;
    env.resolved.seed = a.output.seed;
    env.resolved.k = Some(k);
    env.resolved.truncation = Some(rule);
    if let Some(w) = validate_block_config(n, k)? {
        env.warnings.push(w);
    }
    let mut cfg = LocalTestConfig::new(BlockConfig::new(k).truncated(rule));
    cfg.regularity_a = a.a;
    cfg.lipschitz_l = a.l;
    cfg.c_diamond = a.c_diamond;
    cfg.level = a.level;
    let res = detect_multiple(incr, &cfg, a.r)?;
    let rows = res
        .indices
        .iter()
        .zip(&res.theta_hats)
        .map(|(&index, &theta)| EstimateRow { index, theta })
        .collect();
    env.change_points = Some(res);
    Ok(CsvOutput::Estimates(rows))
}

fn cmd_simulate(a: &SimulateArgs, env: &mut Envelope) -> Result<CsvOutput, CliError> {
    let seed = require_seed(a.output.seed, "simulate")?;
    let path = simulate_ito(&scenario(a.scenario, a.n, seed, a.jump_size))?;
    env.resolved.n = a.n;
    env.resolved.seed = Some(seed);
    let values = path.prices.values().to_vec();
    let nf = a.n as f64;
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &x)| PathRow {
            time: i as f64 / nf,
            logprice: x,
        })
        .collect();
    env.simulation = Some(Simulation {
        true_change_points: path.true_change_points,
        price_jumps: path.price_jumps,
        logprice: values,
    });
    Ok(CsvOutput::Path(rows))
}

fn ecdf_path_for(out: &OutputArgs, explicit: &Option<PathBuf>) -> Option<PathBuf> {
    if explicit.is_some() {
        return explicit.clone();
    }
    let out = out.out.as_ref()?;
    let stem = out.file_stem()?.to_string_lossy();
    Some(out.with_file_name(format!("{stem}_ecdf.csv")))
}

fn cmd_montecarlo(a: &MonteCarloArgs, env: &mut Envelope) -> Result<CsvOutput, CliError> {
    let seed = require_seed(a.output.seed, "montecarlo")?;
    let mut cfg = StudyConfig::new(a.scenario, a.n, a.reps, seed);
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(kk) = a.spot_window {
        cfg.spot_window = kk;
    }
    if !a.level.is_empty() {
        cfg.levels = a.level.clone();
    }
    cfg.bootstrap = a.bootstrap;
    cfg.vol_jump_size = a.jump_size;
    if let Some(rule) = explicit_truncation(&a.trunc) {
        rule.validate()?;
        cfg.truncation = Some(rule);
    }
    env.resolved = Resolved {
        n: a.n,
        seed: Some(seed),
        k: Some(cfg.k),
        spot_window: Some(cfg.spot_window),
        truncation: cfg.truncation,
    };
    let study = run_study(&cfg, a.output.workers)?;
    env.study = Some(StudyTables {
        rates: study.rates.clone(),
        ecdf: study.ecdf.clone(),
    });
    Ok(CsvOutput::Study {
        rates: study.rates,
        ecdf: study.ecdf,
        ecdf_path: ecdf_path_for(&a.output, &a.ecdf_out),
    })
}
