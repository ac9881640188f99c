//! Penalty/benefit scoring of a classical schedule.
//!
//! Every occurrence of a case is counted, scanning tracks in gantry order
//! from head to tail. Counting units:
//!
//! * consecutive run / duration violation: one per working run, depending on
//!   whether its length equals the nominal duration. Idle runs are neutral.
//! * ordered transition: one per adjacent run pair on a track whose statuses
//!   follow the cycle; working-to-working pairs must also share the patient.
//! * completed therapy: one per complete episode.
//! * duplicate treatment: one per complete episode beyond the first for the
//!   same patient, across all gantries.
//! * conflict: one per (slot, unordered gantry pair) with both cells working
//!   on the same patient.
//! * interruption: one per adjacent slot pair on a track, both working with
//!   different patients, where the left slot does not close a `G_PD` run.
//! * time consumption: one per working slot.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{episodes_from_runs, parse_runs, Chromosome, GantryStatus, PatientId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreTable {
    pub conflict: f64,
    pub duration_violation: f64,
    pub duplicate_treatment: f64,
    pub interruption: f64,
    pub time_per_slot: f64,
    pub consecutive_run: f64,
    pub ordered_transition: f64,
    pub completed_therapy: f64,
}

impl Default for ScoreTable {
    fn default() -> Self {
        Self {
            conflict: 20.0,
            duration_violation: 20.0,
            duplicate_treatment: 28.0,
            interruption: 12.0,
            time_per_slot: 1.5,
            consecutive_run: 3.0,
            ordered_transition: 20.0,
            completed_therapy: 20.0,
        }
    }
}

impl ScoreTable {
    pub fn validate(&self) -> Result<(), Error> {
        let weights = [
            ("conflict", self.conflict),
            ("duration_violation", self.duration_violation),
            ("duplicate_treatment", self.duplicate_treatment),
            ("interruption", self.interruption),
            ("time_per_slot", self.time_per_slot),
            ("consecutive_run", self.consecutive_run),
            ("ordered_transition", self.ordered_transition),
            ("completed_therapy", self.completed_therapy),
        ];
        for (name, w) in weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(
                    format!("scores.{name}"),
                    "weight must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }
}

/// Occurrence counts per scoring category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Counts {
    pub conflicts: u64,
    pub duration_violations: u64,
    pub duplicate_treatments: u64,
    pub interruptions: u64,
    pub time_slots: u64,
    pub consecutive_runs: u64,
    pub ordered_transitions: u64,
    pub completed_therapies: u64,
}

impl Counts {
    pub fn total(&self, table: &ScoreTable) -> f64 {
        let benefit = table.consecutive_run * self.consecutive_runs as f64
            + table.ordered_transition * self.ordered_transitions as f64
            + table.completed_therapy * self.completed_therapies as f64;
        let penalty = table.conflict * self.conflicts as f64
            + table.duration_violation * self.duration_violations as f64
            + table.duplicate_treatment * self.duplicate_treatments as f64
            + table.interruption * self.interruptions as f64
            + table.time_per_slot * self.time_slots as f64;
        benefit - penalty
    }

    /// Sum of the four structural penalty counts the repair planner must zero.
    pub fn structural_penalties(&self) -> u64 {
        self.conflicts + self.duration_violations + self.interruptions + self.duplicate_treatments
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    #[serde(flatten)]
    pub counts: Counts,
    pub total: f64,
}

pub fn evaluate_breakdown(chrom: &Chromosome, table: &ScoreTable) -> FitnessBreakdown {
    let counts = count_occurrences(chrom);
    FitnessBreakdown {
        counts,
        total: counts.total(table),
    }
}

pub fn evaluate(chrom: &Chromosome, table: &ScoreTable) -> f64 {
    count_occurrences(chrom).total(table)
}

pub fn count_occurrences(chrom: &Chromosome) -> Counts {
    let mut c = Counts::default();
    let mut completed_per_patient: HashMap<PatientId, u64> = HashMap::new();

    for (g, track) in chrom.tracks().enumerate() {
        let runs = parse_runs(track);
        for r in runs.iter().filter(|r| r.status.is_working()) {
            c.time_slots += r.len as u64;
            if r.has_exact_duration() {
                c.consecutive_runs += 1;
            } else {
                c.duration_violations += 1;
            }
        }
        for pair in runs.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.status.expected_next() != b.status {
                continue;
            }
            if a.status.is_working() && b.status.is_working() && a.patient != b.patient {
                continue;
            }
            c.ordered_transitions += 1;
        }
        for pair in runs.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            // Adjacent runs differ, so a working pair with different patients is
            // exactly one slot boundary.
            if a.status.is_working()
                && b.status.is_working()
                && a.patient != b.patient
                && a.status != GantryStatus::DisposePrep
            {
                c.interruptions += 1;
            }
        }
        for ep in episodes_from_runs(&runs, g).into_iter().filter(|e| e.complete) {
            c.completed_therapies += 1;
            let seen = completed_per_patient.entry(ep.patient).or_insert(0);
            if *seen > 0 {
                c.duplicate_treatments += 1;
            }
            *seen += 1;
        }
    }

    let n_g = chrom.n_g();
    if n_g > 1 {
        for t in 0..chrom.n_t() {
            for g1 in 0..n_g {
                let a = chrom.cell(g1, t);
                if a.is_idle() {
                    continue;
                }
                for g2 in g1 + 1..n_g {
                    if a.same_patient(&chrom.cell(g2, t)) {
                        c.conflicts += 1;
                    }
                }
            }
        }
    }
    c
}
