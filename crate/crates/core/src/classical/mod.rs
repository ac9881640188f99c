//! Conventional genetic algorithm over full-day schedules.
//!
//! Generation loop: evaluate and record, rank-select, cross over, mutate
//! (patient ids and statuses independently), repair. A final evaluation
//! closes the run, so `g_max` generations yield `g_max + 1` records.

mod repair;

use std::time::Instant;

use rand::Rng;

pub use repair::{repair_chromosome, treated_patients};

use crate::error::Error;
use crate::exec::Execution;
use crate::fitness::{evaluate_breakdown, FitnessBreakdown, ScoreTable};
use crate::ga::{
    argmax, choose_mask, crossover_step, ratio_count, select, BestTracker, GaParams,
    GenerationRecord, RunResult,
};
use crate::model::{random_chromosome, Chromosome, GantryStatus, PatientId, ProblemSpec, SlotCell, N_STATUS};
use crate::rng::{Phase, Stream};

/// Gives one random working cell a random patient and spreads that patient
/// over the whole same-status block around it. No-op on an all-idle schedule.
pub fn mutate_patient_ids<R: Rng + ?Sized>(chrom: &mut Chromosome, spec: &ProblemSpec, rng: &mut R) {
    let working = chrom.cells().iter().filter(|c| !c.is_idle()).count();
    if working == 0 {
        return;
    }
    let nth = rng.random_range(0..working);
    let flat = chrom
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_idle())
        .nth(nth)
        .map(|(i, _)| i)
        .expect("nth working cell exists");
    let (g, t) = (flat / chrom.n_t(), flat % chrom.n_t());
    let patient = PatientId(rng.random_range(0..spec.n_p) as u32);

    let track = chrom.track_mut(g);
    let status = track[t].status();
    let mut lo = t;
    while lo > 0 && track[lo - 1].status() == status {
        lo -= 1;
    }
    let mut hi = t;
    while hi + 1 < track.len() && track[hi + 1].status() == status {
        hi += 1;
    }
    for cell in &mut track[lo..=hi] {
        *cell = SlotCell::new(status, patient);
    }
}

/// Gives one random cell a random status and stamps it rightward for that
/// status's nominal duration (truncated at the track end). The stamped
/// patient is the chosen cell's, or a random one if the cell was idle.
pub fn mutate_statuses<R: Rng + ?Sized>(chrom: &mut Chromosome, spec: &ProblemSpec, rng: &mut R) {
    let flat = rng.random_range(0..chrom.cells().len());
    let (g, t) = (flat / chrom.n_t(), flat % chrom.n_t());
    let status = GantryStatus::ALL[rng.random_range(0..N_STATUS)];
    let fallback = PatientId(rng.random_range(0..spec.n_p) as u32);
    let track = chrom.track_mut(g);
    let patient = track[t].patient().unwrap_or(fallback);
    let end = (t + status.duration()).min(track.len());
    for cell in &mut track[t..end] {
        *cell = SlotCell::new(status, patient);
    }
}

/// Runs the classical GA with the default execution mode.
pub fn run_classical(spec: &ProblemSpec, params: &GaParams, table: &ScoreTable) -> Result<RunResult, Error> {
    run_classical_with(spec, params, table, Execution::default())
}

pub fn run_classical_with(
    spec: &ProblemSpec,
    params: &GaParams,
    table: &ScoreTable,
    exec: Execution,
) -> Result<RunResult, Error> {
    spec.validate()?;
    params.validate()?;
    table.validate()?;
    let started = Instant::now();
    let seed = params.seed;

    let seeds: Vec<u64> = (0..params.n_ini as u64).collect();
    let mut pop: Vec<Chromosome> = exec.map(&seeds, |_, &i| {
        random_chromosome(spec, &mut Stream::substream(seed, 0, Phase::Init, i))
    });

    let mut records = Vec::with_capacity(params.g_max + 1);
    let mut best = BestTracker::new();

    for generation in 0..=params.g_max {
        let scores: Vec<FitnessBreakdown> = exec.map(&pop, |_, c| evaluate_breakdown(c, table));
        let (top, top_fitness) = argmax(scores.iter().map(|b| b.total)).expect("non-empty population");
        best.offer(generation, &pop[top], &scores[top]);
        best.close_generation();
        let mut record = GenerationRecord {
            generation,
            best_fitness: top_fitness,
            population: pop.len(),
            survivors: None,
        };
        if generation == params.g_max {
            records.push(record);
            break;
        }

        let scored = pop.into_iter().zip(scores.iter().map(|b| b.total)).collect();
        pop = select(scored, params.r_s, params.n_max)
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        record.survivors = Some(pop.len());
        records.push(record);

        let gen = generation as u64;
        crossover_step(&mut pop, params.r_c, &mut Stream::substream(seed, gen, Phase::Crossover, 0));

        let n = pop.len();
        let n_mut = ratio_count(params.r_m, n);
        let id_mask = choose_mask(&mut Stream::substream(seed, gen, Phase::MutateSelect, 0), n, n_mut);
        let status_mask = choose_mask(&mut Stream::substream(seed, gen, Phase::MutateSelect, 1), n, n_mut);
        exec.for_each_mut(&mut pop, |i, c| {
            if id_mask[i] {
                mutate_patient_ids(c, spec, &mut Stream::substream(seed, gen, Phase::MutateIds, i as u64));
            }
            if status_mask[i] {
                mutate_statuses(c, spec, &mut Stream::substream(seed, gen, Phase::MutateStatuses, i as u64));
            }
        });

        let repair_mask = choose_mask(
            &mut Stream::substream(seed, gen, Phase::RepairSelect, 0),
            n,
            ratio_count(params.r_r, n),
        );
        exec.for_each_mut(&mut pop, |i, c| {
            if repair_mask[i] {
                *c = repair_chromosome(c, spec, &[]);
            }
        });
    }

    let (best_ever, best_ever_curve) = best.finish();
    Ok(RunResult {
        records,
        best_ever,
        best_ever_curve,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::evaluate;
    use crate::model::parse_runs;

    fn spec() -> ProblemSpec {
        ProblemSpec::new(2, 6, 40).unwrap()
    }

    #[test]
    fn id_mutation_on_idle_is_noop() {
        let mut c = Chromosome::idle(2, 10);
        mutate_patient_ids(&mut c, &spec(), &mut Stream::new(1));
        assert_eq!(c, Chromosome::idle(2, 10));
    }

    #[test]
    fn id_mutation_rewrites_whole_block() {
        let spec = ProblemSpec::new(1, 8, 5).unwrap();
        let wp = SlotCell::new(GantryStatus::WaitPatient, PatientId(0));
        let track = vec![SlotCell::IDLE, wp, wp, wp, SlotCell::IDLE];
        for seed in 0..20 {
            let mut c = Chromosome::from_tracks(vec![track.clone()]).unwrap();
            mutate_patient_ids(&mut c, &spec, &mut Stream::new(seed));
            let runs = parse_runs(c.track(0));
            assert_eq!(runs.len(), 3, "block must stay one run");
            assert_eq!(runs[1].len, 3);
        }
    }

    #[test]
    fn id_mutation_single_patient_keeps_ids() {
        let spec = ProblemSpec::new(2, 1, 30).unwrap();
        let orig = random_chromosome(&spec, &mut Stream::new(4));
        let mut c = orig.clone();
        mutate_patient_ids(&mut c, &spec, &mut Stream::new(9));
        assert_eq!(c, orig);
    }

    #[test]
    fn status_mutation_stamps_duration() {
        let spec = ProblemSpec::new(1, 3, 20).unwrap();
        // find a seed that draws slot 0 and G_AT on an idle track
        let mut hit = false;
        for seed in 0..20_000 {
            let mut c = Chromosome::idle(1, 20);
            mutate_statuses(&mut c, &spec, &mut Stream::new(seed));
            if c.cell(0, 0).status() == GantryStatus::AdjustTarget {
                let p = c.cell(0, 0).patient().unwrap();
                assert!((0..15).all(|t| c.cell(0, t) == SlotCell::new(GantryStatus::AdjustTarget, p)));
                assert!((15..20).all(|t| c.cell(0, t).is_idle()));
                hit = true;
                break;
            }
        }
        assert!(hit);
    }

    #[test]
    fn status_mutation_changes_at_most_duration_cells() {
        let spec = ProblemSpec::new(2, 4, 30).unwrap();
        for seed in 0..300 {
            let orig = random_chromosome(&spec, &mut Stream::new(seed));
            let mut c = orig.clone();
            mutate_statuses(&mut c, &spec, &mut Stream::new(seed + 1000));
            let changed: Vec<usize> = (0..c.cells().len())
                .filter(|&i| c.cells()[i] != orig.cells()[i])
                .collect();
            assert!(changed.len() <= 15);
            if let (Some(&a), Some(&b)) = (changed.first(), changed.last()) {
                assert_eq!(a / 30, b / 30, "stamp must stay on one track");
                let s = c.cells()[a].status();
                assert!(b - a < s.duration());
                if s == GantryStatus::Idle {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn status_mutation_truncates_at_track_end() {
        let spec = ProblemSpec::new(1, 2, 6).unwrap();
        for seed in 0..5000 {
            let mut c = Chromosome::idle(1, 6);
            mutate_statuses(&mut c, &spec, &mut Stream::new(seed));
            if c.cell(0, 5).status() == GantryStatus::DisposePrep && c.cell(0, 4).is_idle() {
                assert!((0..5).all(|t| c.cell(0, t).is_idle()));
                return;
            }
        }
        panic!("no seed hit the final slot with G_PD");
    }

    #[test]
    fn zero_generations_gives_one_record() {
        let params = GaParams {
            g_max: 0,
            ..GaParams::medium_classical()
        };
        let r = run_classical(&spec(), &params, &ScoreTable::default()).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].population, 10);
        assert_eq!(r.best_fitness(), r.records[0].best_fitness);
    }

    #[test]
    fn invalid_params_rejected() {
        let params = GaParams {
            r_s: 1.5,
            ..GaParams::medium_classical()
        };
        assert!(run_classical(&spec(), &params, &ScoreTable::default()).is_err());
    }

    #[test]
    fn best_ever_is_monotone_and_consistent() {
        let params = GaParams {
            g_max: 30,
            seed: 11,
            ..GaParams::medium_classical()
        };
        let table = ScoreTable::default();
        let r = run_classical(&spec(), &params, &table).unwrap();
        assert_eq!(r.records.len(), 31);
        assert!(r.best_ever_curve.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*r.best_ever_curve.last().unwrap(), r.best_fitness());
        assert_eq!(evaluate(&r.best_ever.chromosome, &table), r.best_fitness());
        for rec in &r.records[..30] {
            let s = rec.survivors.unwrap();
            assert!((2..=params.n_max).contains(&s));
        }
    }

    #[test]
    fn execution_mode_does_not_change_results() {
        let params = GaParams {
            g_max: 15,
            seed: 3,
            ..GaParams::medium_classical()
        };
        let table = ScoreTable::default();
        let a = run_classical_with(&spec(), &params, &table, Execution::Sequential).unwrap();
        let b = run_classical_with(&spec(), &params, &table, Execution::Parallel).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.best_ever, b.best_ever);
    }
}
