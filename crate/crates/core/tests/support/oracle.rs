//! Brute-force recount of the fitness categories.
//!
//! Deliberately naive: every rule is checked slot by slot against raw cells,
//! never through the run or episode parsers the engine uses.

use std::collections::HashMap;

use gantry_ga::model::CYCLE_LEN;
use gantry_ga::{Chromosome, Counts, GantryStatus, SlotCell};

fn same_cell(a: SlotCell, b: SlotCell) -> bool {
    a.status() == b.status() && a.patient() == b.patient()
}

fn working_with(c: SlotCell, p: u32) -> bool {
    c.status().is_working() && c.patient().map(|x| x.0) == Some(p)
}

/// The 26 statuses of one complete treatment, minute by minute.
fn template() -> Vec<GantryStatus> {
    let mut t = Vec::new();
    for s in GantryStatus::CYCLE {
        for _ in 0..s.duration() {
            t.push(s);
        }
    }
    assert_eq!(t.len(), CYCLE_LEN);
    t
}

pub fn brute_force_counts(chrom: &Chromosome) -> Counts {
    let n_g = chrom.n_g();
    let n_t = chrom.n_t();
    let tmpl = template();
    let mut c = Counts::default();
    let mut completed_per_patient: HashMap<u32, u64> = HashMap::new();

    for g in 0..n_g {
        let cell = |t: usize| chrom.cell(g, t);

        for t in 0..n_t {
            let here = cell(t);
            if here.status().is_working() {
                c.time_slots += 1;
            }

            // t starts a block when the previous cell is different
            let starts_block = t == 0 || !same_cell(cell(t - 1), here);
            if starts_block && here.status().is_working() {
                let mut len = 0;
                while t + len < n_t && same_cell(cell(t + len), here) {
                    len += 1;
                }
                if len == here.status().duration() {
                    c.consecutive_runs += 1;
                } else {
                    c.duration_violations += 1;
                }
            }

            if t > 0 && starts_block {
                let prev = cell(t - 1);
                let in_order = prev.status().expected_next() == here.status();
                let both_working = prev.status().is_working() && here.status().is_working();
                let ids_ok = !both_working
                    || matches!((prev.patient(), here.patient()), (Some(a), Some(b)) if a == b);
                if in_order && ids_ok {
                    c.ordered_transitions += 1;
                }
            }

            if t + 1 < n_t {
                let next = cell(t + 1);
                let both_working = here.status().is_working() && next.status().is_working();
                let differ = here.patient() != next.patient();
                let pd_ends_here =
                    here.status() == GantryStatus::DisposePrep && !same_cell(here, next);
                if both_working && differ && !pd_ends_here {
                    c.interruptions += 1;
                }
            }

            // a same-patient working segment starting at t
            if let Some(p) = here.patient() {
                let p = p.0;
                let fresh = t == 0 || !working_with(cell(t - 1), p);
                if here.status().is_working() && fresh {
                    let mut end = t;
                    while end + 1 < n_t && working_with(cell(end + 1), p) {
                        end += 1;
                    }
                    let len = end - t + 1;
                    let complete =
                        len == CYCLE_LEN && (0..len).all(|k| cell(t + k).status() == tmpl[k]);
                    if complete {
                        c.completed_therapies += 1;
                        *completed_per_patient.entry(p).or_default() += 1;
                    }
                }
            }
        }
    }

    for count in completed_per_patient.values() {
        c.duplicate_treatments += count.saturating_sub(1);
    }

    for t in 0..n_t {
        for g1 in 0..n_g {
            for g2 in (g1 + 1)..n_g {
                let (a, b) = (chrom.cell(g1, t), chrom.cell(g2, t));
                if a.status().is_working()
                    && b.status().is_working()
                    && a.patient().is_some()
                    && a.patient() == b.patient()
                {
                    c.conflicts += 1;
                }
            }
        }
    }
    c
}
