//! Greedy repair planner.
//!
//! Each track is rebuilt left to right against the expected cycle. Between
//! treatments the only legal idle run is a single slot (or a leading idle at
//! slot 0); anywhere else the planner starts a new treatment: it stamps the
//! full canonical cycle for the incumbent cell's patient if that patient is
//! still untreated, otherwise for the lowest-index untreated patient. When no
//! patient is left, or the cycle no longer fits, the rest of the track idles.
//!
//! Tracks are processed in gantry order and every patient is planned at most
//! once, so the output never holds a conflict, a duplicate treatment, an
//! interruption, or a run of non-nominal length.

use crate::model::{canonical_cycle, parse_episodes, Chromosome, PatientId, ProblemSpec, CYCLE_LEN};

pub fn repair_chromosome(
    chrom: &Chromosome,
    spec: &ProblemSpec,
    already_treated: &[PatientId],
) -> Chromosome {
    let n_t = chrom.n_t();
    let mut treated = vec![false; spec.n_p];
    for p in already_treated {
        if let Some(slot) = treated.get_mut(p.index()) {
            *slot = true;
        }
    }
    let mut lowest_untreated = 0usize;

    let mut out = Chromosome::idle(chrom.n_g(), n_t);
    for g in 0..chrom.n_g() {
        let input = chrom.track(g);
        let track = out.track_mut(g);
        let mut t = 0;
        while t < n_t {
            if t > 0 && !track[t - 1].is_idle() {
                // separator after disposal
                t += 1;
                continue;
            }
            let incumbent = input[t];
            if t == 0 && incumbent.is_idle() {
                t += 1;
                continue;
            }
            if t + CYCLE_LEN > n_t {
                break;
            }
            let candidate = incumbent
                .patient()
                .filter(|p| treated.get(p.index()) == Some(&false))
                .or_else(|| {
                    while lowest_untreated < spec.n_p && treated[lowest_untreated] {
                        lowest_untreated += 1;
                    }
                    (lowest_untreated < spec.n_p).then_some(PatientId(lowest_untreated as u32))
                });
            let Some(patient) = candidate else {
                break;
            };
            treated[patient.index()] = true;
            for (dst, cell) in track[t..t + CYCLE_LEN].iter_mut().zip(canonical_cycle(patient)) {
                *dst = cell;
            }
            t += CYCLE_LEN;
        }
        debug_assert!(track.iter().all(|c| c.is_idle() || c.patient().is_some()));
    }
    out
}

/// Patients holding a complete treatment in `chrom`.
pub fn treated_patients(chrom: &Chromosome) -> Vec<PatientId> {
    let mut out: Vec<PatientId> = chrom
        .tracks()
        .enumerate()
        .flat_map(|(g, track)| parse_episodes(track, g))
        .filter(|e| e.complete)
        .map(|e| e.patient)
        .collect();
    out.sort();
    out.dedup();
    out
}
