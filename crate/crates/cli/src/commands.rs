use std::path::{Path, PathBuf};

use gantry_ga::exec::{current_threads, with_threads};
use gantry_ga::sweep::{build_grid, filter_records, run_sweep, summarize, SweepGrid};
use gantry_ga::{qubit_estimate, Algorithm, Execution};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{self, ScheduleDoc};
use crate::CliError;

const DEFAULT_OUT: &str = "out";
/// Records kept in the top subset of a sweep summary.
pub const TOP_K: usize = 10;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub best_fitness: f64,
    pub generations: usize,
    pub elapsed_seconds: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    algorithm: Algorithm,
    seed: u64,
    best_fitness: f64,
    best_generation: usize,
    elapsed_seconds: f64,
    generations: usize,
    n_ini: usize,
    n_max: usize,
    g_max: usize,
    threads: usize,
    config: &'a RunConfig,
}

fn out_dir(flag: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// One GA run; writes `curves.csv`, `best_schedule.json` and `summary.json`.
pub fn cmd_run(opts: &RunOptions) -> Result<RunReport, CliError> {
    let cfg = load(&opts.config, opts.seed)?;
    let spec = cfg.spec()?;
    let params = cfg.params(opts.algorithm);
    let dir = out_dir(&opts.out, &cfg);

    let (result, threads) = with_threads(opts.threads, || {
        let r = opts.algorithm.run(&spec, &params, &cfg.scores, Execution::Parallel);
        (r, current_threads())
    });
    let result = result.map_err(|e| CliError::Runtime(e.to_string()))?;

    let best = &result.best_ever;
    let schedule = ScheduleDoc::new(&best.chromosome, spec.n_p, best.generation, best.breakdown);
    let summary = Summary {
        algorithm: opts.algorithm,
        seed: params.seed,
        best_fitness: result.best_fitness(),
        best_generation: best.generation,
        elapsed_seconds: result.elapsed_seconds,
        generations: result.records.len(),
        n_ini: params.n_ini,
        n_max: params.n_max,
        g_max: params.g_max,
        threads,
        config: &cfg,
    };
    // render everything before touching the output directory
    let curves = output::curves_csv(&result.records)?;
    let schedule = output::to_json(&schedule)?;
    let summary = output::to_json(&summary)?;

    output::ensure_dir(&dir)?;
    output::write_atomic(&dir, output::CURVES, &curves)?;
    output::write_atomic(&dir, output::BEST_SCHEDULE, &schedule)?;
    output::write_atomic(&dir, output::SUMMARY, &summary)?;

    Ok(RunReport {
        out_dir: dir,
        best_fitness: result.best_fitness(),
        generations: result.records.len(),
        elapsed_seconds: result.elapsed_seconds,
    })
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub config: PathBuf,
    pub grid: PathBuf,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub out_dir: PathBuf,
    pub points: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub excluded: usize,
}

pub fn load_grid(path: &Path) -> Result<SweepGrid, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Runs every grid point; writes `sweep.csv` and `sweep_summary.csv`.
/// Excluded parameter values are dropped from both files.
pub fn cmd_sweep(opts: &SweepOptions) -> Result<SweepReport, CliError> {
    let cfg = load(&opts.config, opts.seed)?;
    let grid = load_grid(&opts.grid)?;
    let spec = cfg.spec()?;
    let base = cfg.params(opts.algorithm);
    let points = build_grid(&grid, &base)?;
    let dir = out_dir(&opts.out, &cfg);

    let outcomes = with_threads(opts.threads, || {
        run_sweep(&spec, &points, &cfg.scores, opts.algorithm, base.seed, Execution::Parallel)
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    let succeeded = records.len();
    let failed = failures.len();
    let (records, excluded) = filter_records(records, &grid.exclude);

    let mut rows: Vec<_> = records.iter().cloned().map(Ok).chain(failures.into_iter().map(Err)).collect();
    rows.sort_by_key(|o| match o {
        Ok(r) => r.point,
        Err(f) => f.point,
    });
    let sweep = output::sweep_csv(&rows)?;
    let summary = if records.is_empty() {
        None
    } else {
        Some(output::sweep_summary_csv(&summarize(&records, TOP_K)?)?)
    };

    output::ensure_dir(&dir)?;
    output::write_atomic(&dir, output::SWEEP, &sweep)?;
    if let Some(summary) = summary {
        output::write_atomic(&dir, output::SWEEP_SUMMARY, &summary)?;
    }
    if succeeded == 0 {
        return Err(CliError::Runtime(format!("all {failed} sweep points failed; see {}", output::SWEEP)));
    }
    Ok(SweepReport {
        out_dir: dir,
        points: points.len(),
        succeeded,
        failed,
        excluded,
    })
}

pub fn cmd_qubits(n: u64, n_t: u64, n_g: u64, n_p: u64, n_s: u64) -> Result<u128, CliError> {
    Ok(qubit_estimate(n, n_t, n_g, n_p, n_s)?)
}
