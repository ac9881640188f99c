//! Machinery shared by the classical and quantum-inspired loops: parameters,
//! ranking selection, pairwise single-point crossover, and run records.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exec::Execution;
use crate::fitness::{FitnessBreakdown, ScoreTable};
use crate::model::{Chromosome, ProblemSpec};

/// GA rates, population bounds and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Surviving ratio.
    pub r_s: f64,
    /// Crossover ratio.
    pub r_c: f64,
    /// Mutation ratio.
    pub r_m: f64,
    /// Repair ratio.
    pub r_r: f64,
    pub n_ini: usize,
    pub n_max: usize,
    pub g_max: usize,
    pub seed: u64,
}

impl GaParams {
    /// Medium-instance classical preset.
    pub fn medium_classical() -> Self {
        Self {
            r_s: 0.83,
            r_c: 0.27,
            r_m: 0.37,
            r_r: 0.85,
            n_ini: 10,
            n_max: 150,
            g_max: 200,
            seed: 0,
        }
    }

    /// Medium-instance quantum-inspired preset.
    pub fn medium_quantum() -> Self {
        Self {
            n_max: 50,
            ..Self::medium_classical()
        }
    }

    /// Large-instance classical preset.
    pub fn large_classical() -> Self {
        Self {
            r_s: 0.83,
            r_c: 0.37,
            r_m: 0.37,
            r_r: 0.85,
            n_ini: 40,
            n_max: 250,
            g_max: 200,
            seed: 0,
        }
    }

    /// Large-instance quantum-inspired preset.
    pub fn large_quantum() -> Self {
        Self {
            n_ini: 10,
            n_max: 70,
            ..Self::large_classical()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, r) in [
            ("r_s", self.r_s),
            ("r_c", self.r_c),
            ("r_m", self.r_m),
            ("r_r", self.r_r),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid(name, format!("{r} is outside [0, 1]")));
            }
        }
        if self.n_ini < 2 {
            return Err(Error::invalid("n_ini", "must be at least 2"));
        }
        if self.n_max < 2 {
            return Err(Error::invalid("n_max", "must be at least 2"));
        }
        Ok(())
    }
}

/// `floor(ratio * n)`, tolerant of representation error in the ratio
/// (0.83 * 100 must give 83).
pub fn ratio_count(ratio: f64, n: usize) -> usize {
    (ratio * n as f64 + 1e-9).floor() as usize
}

/// Number of survivors of ranking selection.
pub fn survivor_count(r_s: f64, n: usize, n_max: usize) -> usize {
    ratio_count(r_s, n).max(2).min(n_max).min(n)
}

/// Number of crossover pairs for a population of `n`.
pub fn crossover_pairs(r_c: f64, n: usize) -> usize {
    ((r_c * n as f64 / 2.0) + 1e-9).floor() as usize
}

/// Ranking selection: keeps the top `survivor_count` entries by fitness,
/// highest first, ties resolved toward the lower original index.
pub fn select<G>(pop: Vec<(G, f64)>, r_s: f64, n_max: usize) -> Vec<(G, f64)> {
    let k = survivor_count(r_s, pop.len(), n_max);
    let mut ranked: Vec<(usize, (G, f64))> = pop.into_iter().enumerate().collect();
    ranked.sort_by(|(ia, a), (ib, b)| b.1.total_cmp(&a.1).then(ia.cmp(ib)));
    ranked.truncate(k);
    ranked.into_iter().map(|(_, x)| x).collect()
}

/// A chromosome that can be cut at a point of its flattened gene sequence.
pub trait Genome: Clone + Send + Sync {
    fn gene_count(&self) -> usize;

    /// Children `(self[..point] + other[point..], other[..point] + self[point..])`.
    ///
    /// Panics unless `1 <= point < gene_count()` and both genomes share a shape.
    fn crossover(&self, other: &Self, point: usize) -> (Self, Self);
}

/// Single-point crossover over two equally long gene slices.
pub fn crossover_slices<T: Clone>(a: &[T], b: &[T], point: usize) -> (Vec<T>, Vec<T>) {
    assert_eq!(a.len(), b.len(), "parents differ in length");
    assert!(
        point >= 1 && point < a.len(),
        "crossing point {point} outside [1, {})",
        a.len()
    );
    let mut c1 = Vec::with_capacity(a.len());
    c1.extend_from_slice(&a[..point]);
    c1.extend_from_slice(&b[point..]);
    let mut c2 = Vec::with_capacity(a.len());
    c2.extend_from_slice(&b[..point]);
    c2.extend_from_slice(&a[point..]);
    (c1, c2)
}

impl Genome for Chromosome {
    fn gene_count(&self) -> usize {
        self.cells().len()
    }

    fn crossover(&self, other: &Self, point: usize) -> (Self, Self) {
        assert_eq!(
            (self.n_g(), self.n_t()),
            (other.n_g(), other.n_t()),
            "parents differ in shape"
        );
        let (c1, c2) = crossover_slices(self.cells(), other.cells(), point);
        (
            Chromosome::from_cells(self.n_g(), self.n_t(), c1),
            Chromosome::from_cells(self.n_g(), self.n_t(), c2),
        )
    }
}

pub fn single_point_crossover(a: &Chromosome, b: &Chromosome, point: usize) -> (Chromosome, Chromosome) {
    a.crossover(b, point)
}

/// Draws `floor(r_c * n / 2)` disjoint random pairs and appends both children
/// of each pair; parents stay in place. Returns the number of pairs.
pub fn crossover_step<G: Genome, R: Rng + ?Sized>(pop: &mut Vec<G>, r_c: f64, rng: &mut R) -> usize {
    let n = pop.len();
    let pairs = crossover_pairs(r_c, n);
    if pairs == 0 {
        return 0;
    }
    let picks = index::sample(rng, n, 2 * pairs).into_vec();
    let mut children = Vec::with_capacity(2 * pairs);
    for pair in picks.chunks_exact(2) {
        let (a, b) = (&pop[pair[0]], &pop[pair[1]]);
        let len = a.gene_count();
        if len < 2 {
            children.push(a.clone());
            children.push(b.clone());
            continue;
        }
        let point = rng.random_range(1..len);
        let (c1, c2) = a.crossover(b, point);
        children.push(c1);
        children.push(c2);
    }
    pop.extend(children);
    pairs
}

/// Boolean mask with exactly `count` uniformly chosen `true` entries.
pub fn choose_mask<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<bool> {
    let mut mask = vec![false; n];
    for i in index::sample(rng, n, count.min(n)) {
        mask[i] = true;
    }
    mask
}

/// Which GA variant to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Classical,
    Quantum,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Classical => "classical",
            Algorithm::Quantum => "quantum",
        }
    }

    pub fn run(
        self,
        spec: &ProblemSpec,
        params: &GaParams,
        table: &ScoreTable,
        exec: Execution,
    ) -> Result<RunResult, Error> {
        match self {
            Algorithm::Classical => crate::classical::run_classical_with(spec, params, table, exec),
            Algorithm::Quantum => crate::quantum::run_quantum_with(spec, params, table, exec),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of the convergence curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best fitness in the evaluated population.
    pub best_fitness: f64,
    /// Size of the evaluated population.
    pub population: usize,
    /// Size right after selection; `None` for the final evaluation.
    pub survivors: Option<usize>,
}

/// Best schedule seen over a run together with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct BestEver {
    pub chromosome: Chromosome,
    pub breakdown: FitnessBreakdown,
    pub generation: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<GenerationRecord>,
    pub best_ever: BestEver,
    /// Running maximum of fitness after each generation.
    pub best_ever_curve: Vec<f64>,
    pub elapsed_seconds: f64,
}

impl RunResult {
    pub fn best_fitness(&self) -> f64 {
        self.best_ever.breakdown.total
    }
}

/// Tracks the running maximum; strictly better candidates replace it.
pub(crate) struct BestTracker {
    best: Option<BestEver>,
    curve: Vec<f64>,
}

impl BestTracker {
    pub fn new() -> Self {
        Self {
            best: None,
            curve: Vec::new(),
        }
    }

    pub fn offer(&mut self, generation: usize, chromosome: &Chromosome, breakdown: &FitnessBreakdown) {
        if self
            .best
            .as_ref()
            .is_none_or(|b| breakdown.total > b.breakdown.total)
        {
            self.best = Some(BestEver {
                chromosome: chromosome.clone(),
                breakdown: *breakdown,
                generation,
            });
        }
    }

    pub fn close_generation(&mut self) {
        if let Some(b) = &self.best {
            self.curve.push(b.breakdown.total);
        }
    }

    pub fn finish(self) -> (BestEver, Vec<f64>) {
        (self.best.expect("at least one evaluation"), self.curve)
    }
}

/// Index of the first maximum.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    values.into_iter().enumerate().fold(None, |acc, (i, v)| match acc {
        Some((_, best)) if v <= best => acc,
        _ => Some((i, v)),
    })
}
