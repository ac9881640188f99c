//! Quantum-inspired GA over qudit chromosomes.
//!
//! Each cell holds two real superpositions, one over patient ids and one over
//! the eight statuses. Fitness is taken from a simulated single-shot
//! measurement that leaves the amplitudes untouched; mutation collapses a
//! cell to random basis states; repair amplifies the amplitudes of the
//! schedule the classical repair planner derives from a measurement.

mod amplitude;

use std::time::Instant;

use rand::Rng;

pub use amplitude::{
    amplify, amplify_in_place, norm_sq, sample_index, AmplitudeVector, AMPLIFY_CAP_SQ,
    AMPLIFY_FACTOR, AMPLIFY_FLOOR, NORM_TOL,
};

use crate::classical::repair_chromosome;
use crate::error::Error;
use crate::exec::Execution;
use crate::fitness::{evaluate_breakdown, FitnessBreakdown, ScoreTable};
use crate::ga::{
    argmax, choose_mask, crossover_step, ratio_count, select, BestTracker, GaParams, Genome,
    GenerationRecord, RunResult,
};
use crate::model::{Chromosome, GantryStatus, PatientId, ProblemSpec, SlotCell, N_STATUS};
use crate::rng::{Phase, Stream};

/// Owned copy of one cell's two states.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditCell {
    pub id_state: AmplitudeVector,
    pub status_state: AmplitudeVector,
}

/// `n_g x n_t` grid of qudit cells. Amplitudes are stored in two flat
/// track-major arrays: `n_p` id amplitudes and 8 status amplitudes per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChromosome {
    n_g: usize,
    n_t: usize,
    n_p: usize,
    ids: Vec<f64>,
    statuses: Vec<f64>,
}

impl QuantumChromosome {
    /// Every cell in uniform superposition.
    pub fn uniform(spec: &ProblemSpec) -> Self {
        let cells = spec.cells();
        Self {
            n_g: spec.n_g,
            n_t: spec.n_t,
            n_p: spec.n_p,
            ids: vec![1.0 / (spec.n_p as f64).sqrt(); cells * spec.n_p],
            statuses: vec![1.0 / (N_STATUS as f64).sqrt(); cells * N_STATUS],
        }
    }

    /// Basis-state chromosome that always measures as `chrom`. Idle cells get
    /// patient 0 in their id state.
    pub fn from_classical(chrom: &Chromosome, n_p: usize) -> Self {
        let cells = chrom.cells().len();
        let mut q = Self {
            n_g: chrom.n_g(),
            n_t: chrom.n_t(),
            n_p,
            ids: vec![0.0; cells * n_p],
            statuses: vec![0.0; cells * N_STATUS],
        };
        for (i, c) in chrom.cells().iter().enumerate() {
            q.statuses[i * N_STATUS + c.status().index()] = 1.0;
            q.ids[i * n_p + c.patient().map_or(0, |p| p.index())] = 1.0;
        }
        q
    }

    pub fn n_g(&self) -> usize {
        self.n_g
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn cell_count(&self) -> usize {
        self.n_g * self.n_t
    }

    fn flat(&self, g: usize, t: usize) -> usize {
        assert!(g < self.n_g && t < self.n_t);
        g * self.n_t + t
    }

    pub fn id_amplitudes(&self, g: usize, t: usize) -> &[f64] {
        let i = self.flat(g, t);
        &self.ids[i * self.n_p..(i + 1) * self.n_p]
    }

    pub fn status_amplitudes(&self, g: usize, t: usize) -> &[f64] {
        let i = self.flat(g, t);
        &self.statuses[i * N_STATUS..(i + 1) * N_STATUS]
    }

    pub fn cell(&self, g: usize, t: usize) -> QuditCell {
        QuditCell {
            id_state: AmplitudeVector::new(self.id_amplitudes(g, t).to_vec())
                .unwrap_or_else(|e| panic!("cell ({g}, {t}) id state: {e}")),
            status_state: AmplitudeVector::new(self.status_amplitudes(g, t).to_vec())
                .unwrap_or_else(|e| panic!("cell ({g}, {t}) status state: {e}")),
        }
    }

    pub fn set_cell(&mut self, g: usize, t: usize, cell: &QuditCell) {
        assert_eq!(cell.id_state.dim(), self.n_p);
        assert_eq!(cell.status_state.dim(), N_STATUS);
        let i = self.flat(g, t);
        let n_p = self.n_p;
        self.ids[i * n_p..(i + 1) * n_p].copy_from_slice(cell.id_state.as_slice());
        self.statuses[i * N_STATUS..(i + 1) * N_STATUS].copy_from_slice(cell.status_state.as_slice());
    }

    /// Iterator over `(id amplitudes, status amplitudes)` in track-major order.
    pub fn states(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        self.ids
            .chunks_exact(self.n_p)
            .zip(self.statuses.chunks_exact(N_STATUS))
    }

    /// Largest `|sum a^2 - 1|` over all amplitude vectors.
    pub fn max_norm_drift(&self) -> f64 {
        self.states()
            .flat_map(|(id, st)| [norm_sq(id), norm_sq(st)])
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl Genome for QuantumChromosome {
    fn gene_count(&self) -> usize {
        self.cell_count()
    }

    fn crossover(&self, other: &Self, point: usize) -> (Self, Self) {
        assert_eq!(
            (self.n_g, self.n_t, self.n_p),
            (other.n_g, other.n_t, other.n_p),
            "parents differ in shape"
        );
        let cells = self.cell_count();
        assert!(
            point >= 1 && point < cells,
            "crossing point {point} outside [1, {cells})"
        );
        let splice = |a: &[f64], b: &[f64], width: usize| {
            let cut = point * width;
            let mut v = Vec::with_capacity(a.len());
            v.extend_from_slice(&a[..cut]);
            v.extend_from_slice(&b[cut..]);
            v
        };
        let child = |a: &Self, b: &Self| Self {
            ids: splice(&a.ids, &b.ids, self.n_p),
            statuses: splice(&a.statuses, &b.statuses, N_STATUS),
            ..*a
        };
        (child(self, other), child(other, self))
    }
}

pub fn uniform_quantum_chromosome(spec: &ProblemSpec) -> QuantumChromosome {
    QuantumChromosome::uniform(spec)
}

pub fn q_single_point_crossover(
    a: &QuantumChromosome,
    b: &QuantumChromosome,
    point: usize,
) -> (QuantumChromosome, QuantumChromosome) {
    a.crossover(b, point)
}

/// Simulated non-demolition measurement: samples a status and then an id per
/// cell. The id draw is consumed even for idle outcomes so the stream layout
/// does not depend on the results.
pub fn observe<R: Rng + ?Sized>(q: &QuantumChromosome, rng: &mut R) -> Chromosome {
    let mut cells = Vec::with_capacity(q.cell_count());
    for (id, st) in q.states() {
        let u_status: f64 = rng.random();
        let u_id: f64 = rng.random();
        let status = GantryStatus::ALL[sample_index(st, u_status)];
        let patient = PatientId(sample_index(id, u_id) as u32);
        cells.push(SlotCell::new(status, patient));
    }
    Chromosome::from_cells(q.n_g, q.n_t, cells)
}

/// Fitness of one measurement, returned with the measured schedule.
pub fn q_evaluate<R: Rng + ?Sized>(
    q: &QuantumChromosome,
    table: &ScoreTable,
    rng: &mut R,
) -> (FitnessBreakdown, Chromosome) {
    let shadow = observe(q, rng);
    (evaluate_breakdown(&shadow, table), shadow)
}

/// Demolition mutation: one random cell collapses to a random id basis
/// state and a random status basis state.
pub fn q_mutate<R: Rng + ?Sized>(q: &mut QuantumChromosome, rng: &mut R) {
    let i = rng.random_range(0..q.cell_count());
    let id = rng.random_range(0..q.n_p);
    let status = rng.random_range(0..N_STATUS);
    let n_p = q.n_p;
    let ids = &mut q.ids[i * n_p..(i + 1) * n_p];
    ids.fill(0.0);
    ids[id] = 1.0;
    let st = &mut q.statuses[i * N_STATUS..(i + 1) * N_STATUS];
    st.fill(0.0);
    st[status] = 1.0;
}

/// Measures `q`, plans the repaired schedule from that measurement, and
/// amplifies each cell toward it. Idle target cells only touch the status
/// state. Returns the planned schedule.
pub fn q_repair<R: Rng + ?Sized>(q: &mut QuantumChromosome, spec: &ProblemSpec, rng: &mut R) -> Chromosome {
    let shadow = observe(q, rng);
    let desired = repair_chromosome(&shadow, spec, &[]);
    let n_p = q.n_p;
    for (i, cell) in desired.cells().iter().enumerate() {
        amplify_in_place(
            &mut q.statuses[i * N_STATUS..(i + 1) * N_STATUS],
            cell.status().index(),
        );
        if let Some(p) = cell.patient() {
            amplify_in_place(&mut q.ids[i * n_p..(i + 1) * n_p], p.index());
        }
    }
    desired
}

pub fn run_quantum(spec: &ProblemSpec, params: &GaParams, table: &ScoreTable) -> Result<RunResult, Error> {
    run_quantum_with(spec, params, table, Execution::default())
}

/// Same loop as the classical GA with quantum operators. Ranking uses one
/// fresh measurement per chromosome per generation; that measurement is also
/// the schedule offered to the best-ever record.
pub fn run_quantum_with(
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

    let mut pop: Vec<QuantumChromosome> = vec![QuantumChromosome::uniform(spec); params.n_ini];
    let mut records = Vec::with_capacity(params.g_max + 1);
    let mut best = BestTracker::new();

    for generation in 0..=params.g_max {
        let gen = generation as u64;
        let evaluated: Vec<(FitnessBreakdown, Chromosome)> = exec.map(&pop, |i, q| {
            q_evaluate(q, table, &mut Stream::substream(seed, gen, Phase::Evaluate, i as u64))
        });
        let (top, top_fitness) =
            argmax(evaluated.iter().map(|(b, _)| b.total)).expect("non-empty population");
        best.offer(generation, &evaluated[top].1, &evaluated[top].0);
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

        let scored = pop
            .into_iter()
            .zip(evaluated.iter().map(|(b, _)| b.total))
            .collect();
        pop = select(scored, params.r_s, params.n_max)
            .into_iter()
            .map(|(q, _)| q)
            .collect();
        record.survivors = Some(pop.len());
        records.push(record);

        crossover_step(&mut pop, params.r_c, &mut Stream::substream(seed, gen, Phase::Crossover, 0));

        let n = pop.len();
        let mutate_mask = choose_mask(
            &mut Stream::substream(seed, gen, Phase::MutateSelect, 0),
            n,
            ratio_count(params.r_m, n),
        );
        exec.for_each_mut(&mut pop, |i, q| {
            if mutate_mask[i] {
                q_mutate(q, &mut Stream::substream(seed, gen, Phase::MutateIds, i as u64));
            }
        });

        let repair_mask = choose_mask(
            &mut Stream::substream(seed, gen, Phase::RepairSelect, 0),
            n,
            ratio_count(params.r_r, n),
        );
        exec.for_each_mut(&mut pop, |i, q| {
            if repair_mask[i] {
                q_repair(q, spec, &mut Stream::substream(seed, gen, Phase::Repair, i as u64));
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

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Qubits needed to hold a population of `n` chromosomes with binary-encoded
/// ids and statuses: `n * n_t * n_g * (ceil(log2 n_p) + ceil(log2 n_s))`.
pub fn qubit_estimate(n: u64, n_t: u64, n_g: u64, n_p: u64, n_s: u64) -> Result<u128, Error> {
    for (name, v) in [("N", n), ("n_t", n_t), ("n_g", n_g), ("n_p", n_p), ("n_s", n_s)] {
        if v == 0 {
            return Err(Error::invalid(name, "must be at least 1"));
        }
    }
    let bits = u128::from(ceil_log2(n_p) + ceil_log2(n_s));
    [u128::from(n), u128::from(n_t), u128::from(n_g)]
        .into_iter()
        .try_fold(bits, |acc, x| acc.checked_mul(x))
        .ok_or(Error::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::evaluate;
    use crate::model::{parse_episodes, random_chromosome};
    use crate::testutil::perfect_track;

    fn bits(q: &QuantumChromosome) -> (Vec<u64>, Vec<u64>) {
        (
            q.ids.iter().map(|x| x.to_bits()).collect(),
            q.statuses.iter().map(|x| x.to_bits()).collect(),
        )
    }

    #[test]
    fn uniform_amplitudes() {
        let q = uniform_quantum_chromosome(&ProblemSpec::new(2, 4, 5).unwrap());
        assert!(q.id_amplitudes(1, 3).iter().all(|&a| a == 0.5));
        assert!(q
            .status_amplitudes(0, 0)
            .iter()
            .all(|&a| (a - 0.353_55).abs() < 1e-5));
        assert!(q.max_norm_drift() < 1e-12);
    }

    #[test]
    fn basis_chromosome_observes_deterministically() {
        let spec = ProblemSpec::new(2, 5, 30).unwrap();
        let c = random_chromosome(&spec, &mut Stream::new(8));
        let q = QuantumChromosome::from_classical(&c, spec.n_p);
        for seed in 0..5 {
            assert_eq!(observe(&q, &mut Stream::new(seed)), c);
        }
    }

    #[test]
    fn observe_is_non_demolition() {
        let spec = ProblemSpec::new(2, 6, 20).unwrap();
        let mut q = QuantumChromosome::uniform(&spec);
        q_repair(&mut q, &spec, &mut Stream::new(1));
        let before = bits(&q);
        let mut rng = Stream::new(2);
        for _ in 0..100 {
            observe(&q, &mut rng);
        }
        assert_eq!(bits(&q), before);
    }

    #[test]
    fn evaluate_examples() {
        let table = ScoreTable::default();
        let perfect = Chromosome::from_tracks(vec![perfect_track(28, 0)]).unwrap();
        let q = QuantumChromosome::from_classical(&perfect, 1);
        let (b, shadow) = q_evaluate(&q, &table, &mut Stream::new(3));
        assert_eq!(b.total, 162.0);
        assert_eq!(shadow, perfect);

        let idle = QuantumChromosome::from_classical(&Chromosome::idle(2, 10), 3);
        assert_eq!(q_evaluate(&idle, &table, &mut Stream::new(3)).0.total, 0.0);

        let spec = ProblemSpec::new(3, 12, 40).unwrap();
        let uq = QuantumChromosome::uniform(&spec);
        let a = q_evaluate(&uq, &table, &mut Stream::substream(1, 2, Phase::Evaluate, 3));
        let b = q_evaluate(&uq, &table, &mut Stream::substream(1, 2, Phase::Evaluate, 3));
        assert_eq!(a, b);
        assert_eq!(a.0.total, evaluate(&a.1, &table));
    }

    #[test]
    fn crossover_copies_cells() {
        let spec = ProblemSpec::new(2, 3, 4).unwrap();
        let a = QuantumChromosome::uniform(&spec);
        let mut b = a.clone();
        for i in 0..8 {
            q_mutate(&mut b, &mut Stream::new(i));
        }
        let (c1, c2) = q_single_point_crossover(&a, &a, 3);
        assert_eq!((&c1, &c2), (&a, &a));

        let (c1, c2) = q_single_point_crossover(&a, &b, 1);
        assert_eq!(c1.cell(0, 0), a.cell(0, 0));
        assert_eq!(c2.cell(0, 0), b.cell(0, 0));
        for flat in 1..8 {
            let (g, t) = (flat / 4, flat % 4);
            assert_eq!(c1.cell(g, t), b.cell(g, t));
            assert_eq!(c2.cell(g, t), a.cell(g, t));
        }
        assert!(c1.max_norm_drift() < 1e-12 && c2.max_norm_drift() < 1e-12);
        // involution at a fixed point
        let (r1, r2) = q_single_point_crossover(&c1, &c2, 1);
        assert_eq!((r1, r2), (a, b));
    }

    #[test]
    fn mutation_collapses_one_cell() {
        let spec = ProblemSpec::new(2, 5, 6).unwrap();
        let orig = QuantumChromosome::uniform(&spec);
        for seed in 0..20 {
            let mut q = orig.clone();
            q_mutate(&mut q, &mut Stream::new(seed));
            let mut changed = 0;
            for g in 0..2 {
                for t in 0..6 {
                    if q.cell(g, t) != orig.cell(g, t) {
                        changed += 1;
                        let ids = q.id_amplitudes(g, t);
                        assert_eq!(ids.iter().filter(|&&a| a == 1.0).count(), 1);
                        assert_eq!(ids.iter().filter(|&&a| a == 0.0).count(), 4);
                        let st = q.status_amplitudes(g, t);
                        assert_eq!(st.iter().filter(|&&a| a == 1.0).count(), 1);
                    }
                }
            }
            assert_eq!(changed, 1);
        }
        let spec1 = ProblemSpec::new(1, 1, 3).unwrap();
        let mut q = QuantumChromosome::uniform(&spec1);
        q_mutate(&mut q, &mut Stream::new(0));
        assert!((0..3).all(|t| q.id_amplitudes(0, t) == [1.0]));
    }

    #[test]
    fn repair_fixed_point_on_repaired_basis_state() {
        let spec = ProblemSpec::new(3, 12, 108).unwrap();
        let c = random_chromosome(&spec, &mut Stream::new(5));
        let planned = repair_chromosome(&c, &spec, &[]);
        let mut q = QuantumChromosome::from_classical(&planned, spec.n_p);
        let before = q.clone();
        let desired = q_repair(&mut q, &spec, &mut Stream::new(6));
        assert_eq!(desired, planned);
        assert_eq!(q, before);
    }

    #[test]
    fn repair_concentrates_on_plan() {
        let spec = ProblemSpec::new(1, 1, 27).unwrap();
        let mut q = QuantumChromosome::uniform(&spec);
        let desired = q_repair(&mut q, &spec, &mut Stream::new(42));
        assert_eq!(parse_episodes(desired.track(0), 0).len(), 1);
        let mut hits = [0usize; 27];
        let mut rng = Stream::new(43);
        for _ in 0..100 {
            let shot = observe(&q, &mut rng);
            for (t, h) in hits.iter_mut().enumerate() {
                if shot.cell(0, t).status() == desired.cell(0, t).status() {
                    *h += 1;
                }
            }
        }
        assert!(hits.iter().all(|&h| h >= 90), "{hits:?}");
    }

    #[test]
    fn repeated_repair_keeps_norms() {
        let spec = ProblemSpec::new(1, 3, 30).unwrap();
        let mut q = QuantumChromosome::uniform(&spec);
        let mut rng = Stream::new(9);
        for i in 0..10_000 {
            if i % 7 == 0 {
                q_mutate(&mut q, &mut rng);
            }
            q_repair(&mut q, &spec, &mut rng);
        }
        assert!(q.max_norm_drift() <= 1e-6);
    }

    #[test]
    fn qubit_examples() {
        assert_eq!(qubit_estimate(70, 650, 3, 72, 8).unwrap(), 1_365_000);
        assert_eq!(qubit_estimate(1, 1, 1, 2, 2).unwrap(), 2);
        assert_eq!(qubit_estimate(1, 108, 3, 12, 8).unwrap(), 2268);
        assert_eq!(qubit_estimate(5, 5, 5, 1, 1).unwrap(), 0);
        assert!(qubit_estimate(1, 1, 1, 0, 8).is_err());
        assert_eq!(
            qubit_estimate(u64::MAX, u64::MAX, u64::MAX, u64::MAX, 8),
            Err(Error::Overflow)
        );
        assert_eq!(ceil_log2(72), 7);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
    }

    #[test]
    fn zero_generations_and_monotone_best() {
        let spec = ProblemSpec::new(2, 4, 40).unwrap();
        let table = ScoreTable::default();
        let params = GaParams {
            g_max: 0,
            ..GaParams::medium_quantum()
        };
        assert_eq!(run_quantum(&spec, &params, &table).unwrap().records.len(), 1);

        let params = GaParams {
            g_max: 25,
            seed: 4,
            ..GaParams::medium_quantum()
        };
        let r = run_quantum(&spec, &params, &table).unwrap();
        assert_eq!(r.records.len(), 26);
        assert!(r.best_ever_curve.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(evaluate(&r.best_ever.chromosome, &table), r.best_fitness());
        assert!(r.records.iter().filter_map(|x| x.survivors).all(|s| s <= 50));
    }

    #[test]
    fn execution_mode_does_not_change_results() {
        let spec = ProblemSpec::new(2, 4, 40).unwrap();
        let table = ScoreTable::default();
        let params = GaParams {
            g_max: 10,
            seed: 12,
            ..GaParams::medium_quantum()
        };
        let a = run_quantum_with(&spec, &params, &table, Execution::Sequential).unwrap();
        let b = run_quantum_with(&spec, &params, &table, Execution::Parallel).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.best_ever, b.best_ever);
    }
}
