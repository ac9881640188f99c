//! Parameter sweeps: grid construction, batch runs, outlier exclusion and
//! descriptive statistics.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exec::Execution;
use crate::fitness::ScoreTable;
use crate::ga::{Algorithm, GaParams};
use crate::model::ProblemSpec;
use crate::rng::mix_words;

/// Default grid step for the medium instance.
pub const MEDIUM_STEP: f64 = 0.02;
/// Default grid step for the large instance.
pub const LARGE_STEP: f64 = 0.05;

/// The rates a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "r_s")]
    Survive,
    #[serde(rename = "r_c")]
    Crossover,
    #[serde(rename = "r_m")]
    Mutation,
    #[serde(rename = "r_r", alias = "r_T")]
    Repair,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Survive => "r_s",
            SweepParam::Crossover => "r_c",
            SweepParam::Mutation => "r_m",
            SweepParam::Repair => "r_r",
        }
    }

    pub fn get(self, p: &GaParams) -> f64 {
        match self {
            SweepParam::Survive => p.r_s,
            SweepParam::Crossover => p.r_c,
            SweepParam::Mutation => p.r_m,
            SweepParam::Repair => p.r_r,
        }
    }

    fn set(self, p: &mut GaParams, v: f64) {
        match self {
            SweepParam::Survive => p.r_s = v,
            SweepParam::Crossover => p.r_c = v,
            SweepParam::Mutation => p.r_m = v,
            SweepParam::Repair => p.r_r = v,
        }
    }
}

fn default_step() -> f64 {
    MEDIUM_STEP
}

/// Values `center - half_width ..= center + half_width` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub center: f64,
    pub half_width: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

impl SweepAxis {
    pub fn values(&self) -> Result<Vec<f64>, Error> {
        let field = || format!("axes.{}", self.param.name());
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid(field(), "step must be positive"));
        }
        if !(self.half_width.is_finite() && self.half_width >= 0.0) {
            return Err(Error::invalid(field(), "half_width must be non-negative"));
        }
        let steps = (2.0 * self.half_width / self.step + 1e-9).floor() as usize;
        let lo = self.center - self.half_width;
        let values: Vec<f64> = (0..=steps)
            .map(|i| round2(lo + i as f64 * self.step))
            .collect();
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(field(), format!("value {v} is outside [0, 1]")));
        }
        Ok(values)
    }
}

/// Parameter values excluded from reported results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Exclusion {
    fn matches(&self, p: &GaParams) -> bool {
        let v = round2(self.param.get(p));
        self.values.iter().any(|&x| round2(x) == v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub exclude: Vec<Exclusion>,
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Cartesian product of the axis values over `base`; the first axis varies
/// slowest.
pub fn build_grid(grid: &SweepGrid, base: &GaParams) -> Result<Vec<GaParams>, Error> {
    if grid.axes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, a) in grid.axes.iter().enumerate() {
        if grid.axes[..i].iter().any(|b| b.param == a.param) {
            return Err(Error::invalid(
                format!("axes.{}", a.param.name()),
                "parameter appears twice",
            ));
        }
    }
    let mut points = vec![*base];
    for axis in &grid.axes {
        let values = axis.values()?;
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p;
                    axis.param.set(&mut q, v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: usize,
    /// Parameters as run, including the derived seed.
    pub params: GaParams,
    pub algorithm: Algorithm,
    pub best_fitness: f64,
    pub run_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub point: usize,
    pub params: GaParams,
    pub error: Error,
}

pub type PointOutcome = Result<SweepRecord, PointFailure>;

/// Seed of grid point `point`.
pub fn point_seed(master_seed: u64, point: usize) -> u64 {
    mix_words(&[master_seed, point as u64])
}

/// Runs every grid point once. Points run concurrently under
/// [`Execution::Parallel`]; each run itself is sequential.
pub fn run_sweep(
    spec: &ProblemSpec,
    points: &[GaParams],
    table: &ScoreTable,
    algorithm: Algorithm,
    master_seed: u64,
    exec: Execution,
) -> Vec<PointOutcome> {
    exec.map(points, |i, p| {
        let params = p.with_seed(point_seed(master_seed, i));
        let started = Instant::now();
        match algorithm.run(spec, &params, table, Execution::Sequential) {
            Ok(r) => Ok(SweepRecord {
                point: i,
                params,
                algorithm,
                best_fitness: r.best_fitness(),
                run_seconds: started.elapsed().as_secs_f64(),
            }),
            Err(error) => Err(PointFailure {
                point: i,
                params,
                error,
            }),
        }
    })
}

/// Drops records matching any exclusion; returns survivors and the number
/// removed.
pub fn filter_records(records: Vec<SweepRecord>, exclusions: &[Exclusion]) -> (Vec<SweepRecord>, usize) {
    let before = records.len();
    let kept: Vec<SweepRecord> = records
        .into_iter()
        .filter(|r| !exclusions.iter().any(|e| e.matches(&r.params)))
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// Descriptive statistics with the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub std: f64,
}

impl Stats {
    /// `None` for an empty input. Values are sorted first so the result does
    /// not depend on input order.
    pub fn from_values(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Stats {
            count: v.len(),
            mean,
            max: v[v.len() - 1],
            min: v[0],
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetStats {
    pub fitness: Stats,
    pub run_seconds: Stats,
}

impl SubsetStats {
    fn of(records: &[&SweepRecord]) -> Option<Self> {
        let fitness: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
        let times: Vec<f64> = records.iter().map(|r| r.run_seconds).collect();
        Some(Self {
            fitness: Stats::from_values(&fitness)?,
            run_seconds: Stats::from_values(&times)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub all: SubsetStats,
    /// Statistics over the `k` highest-fitness records.
    pub top: SubsetStats,
    pub k: usize,
}

pub fn summarize(records: &[SweepRecord], k: usize) -> Result<SweepSummary, Error> {
    let mut refs: Vec<&SweepRecord> = records.iter().collect();
    let all = SubsetStats::of(&refs).ok_or(Error::EmptyRecords)?;
    refs.sort_by(|a, b| {
        b.best_fitness
            .total_cmp(&a.best_fitness)
            .then(a.run_seconds.total_cmp(&b.run_seconds))
    });
    refs.truncate(k.max(1));
    let top = SubsetStats::of(&refs).ok_or(Error::EmptyRecords)?;
    Ok(SweepSummary { all, top, k })
}
