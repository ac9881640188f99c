//! Output artifacts. Every file is written to a temporary sibling and
//! renamed into place, so readers never see a partial file.
//!
//! Column order is fixed:
//! - `curves.csv`: generation, best_fitness, population
//! - `sweep.csv`: point, r_s, r_c, r_m, r_r, n_ini, n_max, g_max, algorithm,
//!   seed, best_fitness, run_seconds, error
//! - `sweep_summary.csv`: subset, count, fitness_{mean,max,min,std},
//!   run_seconds_{mean,max,min,std}
//!
//! Fitness values use shortest round-trip formatting; ratio columns use two
//! decimals.

use std::fs;
use std::io::Write;
use std::path::Path;

use gantry_ga::sweep::{PointOutcome, SubsetStats, SweepSummary};
use gantry_ga::{
    evaluate_breakdown, Chromosome, FitnessBreakdown, GantryStatus, GenerationRecord, PatientId,
    ScoreTable, SlotCell,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CURVES: &str = "curves.csv";
pub const BEST_SCHEDULE: &str = "best_schedule.json";
pub const SUMMARY: &str = "summary.json";
pub const SWEEP: &str = "sweep.csv";
pub const SWEEP_SUMMARY: &str = "sweep_summary.csv";

/// Writes `bytes` to `dir/name` via a temp file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: &dyn std::fmt::Display| CliError::Runtime(format!("writing {}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(dir.join(name)).map_err(|e| fail(&e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))
}

fn csv_bytes(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| CliError::Runtime(e.to_string()))?;
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn curves_csv(records: &[GenerationRecord]) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        w.write_record(["generation", "best_fitness", "population"])?;
        for r in records {
            w.write_record([
                r.generation.to_string(),
                r.best_fitness.to_string(),
                r.population.to_string(),
            ])?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub status: GantryStatus,
    pub patient: Option<u32>,
}

/// `best_schedule.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub n_g: usize,
    pub n_p: usize,
    pub n_t: usize,
    /// Generation in which the schedule was first seen.
    pub generation: usize,
    pub tracks: Vec<Vec<CellDoc>>,
    pub fitness: FitnessBreakdown,
}

impl ScheduleDoc {
    pub fn new(chrom: &Chromosome, n_p: usize, generation: usize, fitness: FitnessBreakdown) -> Self {
        let tracks = chrom
            .tracks()
            .map(|t| {
                t.iter()
                    .map(|c| CellDoc {
                        status: c.status(),
                        patient: c.patient().map(|p| p.0),
                    })
                    .collect()
            })
            .collect();
        Self {
            n_g: chrom.n_g(),
            n_p,
            n_t: chrom.n_t(),
            generation,
            tracks,
            fitness,
        }
    }

    pub fn to_chromosome(&self) -> Result<Chromosome, gantry_ga::Error> {
        let tracks = self
            .tracks
            .iter()
            .map(|t| {
                t.iter()
                    .map(|c| SlotCell::try_new(c.status, c.patient.map(PatientId)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Chromosome::from_tracks(tracks)
    }

    /// Whether re-scoring the schedule reproduces the embedded breakdown.
    pub fn verify(&self, table: &ScoreTable) -> Result<bool, gantry_ga::Error> {
        Ok(evaluate_breakdown(&self.to_chromosome()?, table) == self.fitness)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn sweep_csv(outcomes: &[PointOutcome]) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        w.write_record([
            "point", "r_s", "r_c", "r_m", "r_r", "n_ini", "n_max", "g_max", "algorithm", "seed",
            "best_fitness", "run_seconds", "error",
        ])?;
        for o in outcomes {
            let (point, p, alg, fitness, seconds, error) = match o {
                Ok(r) => (
                    r.point,
                    &r.params,
                    r.algorithm.to_string(),
                    r.best_fitness.to_string(),
                    r.run_seconds.to_string(),
                    String::new(),
                ),
                Err(f) => (f.point, &f.params, String::new(), String::new(), String::new(), f.error.to_string()),
            };
            w.write_record([
                point.to_string(),
                format!("{:.2}", p.r_s),
                format!("{:.2}", p.r_c),
                format!("{:.2}", p.r_m),
                format!("{:.2}", p.r_r),
                p.n_ini.to_string(),
                p.n_max.to_string(),
                p.g_max.to_string(),
                alg,
                p.seed.to_string(),
                fitness,
                seconds,
                error,
            ])?;
        }
        Ok(())
    })
}

pub fn sweep_summary_csv(summary: &SweepSummary) -> Result<Vec<u8>, CliError> {
    let row = |label: String, s: &SubsetStats| {
        vec![
            label,
            s.fitness.count.to_string(),
            s.fitness.mean.to_string(),
            s.fitness.max.to_string(),
            s.fitness.min.to_string(),
            s.fitness.std.to_string(),
            s.run_seconds.mean.to_string(),
            s.run_seconds.max.to_string(),
            s.run_seconds.min.to_string(),
            s.run_seconds.std.to_string(),
        ]
    };
    csv_bytes(|w| {
        w.write_record([
            "subset",
            "count",
            "fitness_mean",
            "fitness_max",
            "fitness_min",
            "fitness_std",
            "run_seconds_mean",
            "run_seconds_max",
            "run_seconds_min",
            "run_seconds_std",
        ])?;
        w.write_record(row("all".into(), &summary.all))?;
        w.write_record(row(format!("top{}", summary.k), &summary.top))?;
        Ok(())
    })
}
