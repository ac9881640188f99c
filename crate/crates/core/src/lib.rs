//! Daily multi-gantry radiotherapy scheduling with a classical genetic
//! algorithm and a quantum-inspired (qudit) genetic algorithm.
//!
//! Per-chromosome work runs on rayon when the `parallel` feature is on (the
//! default). Every random draw comes from a substream keyed by seed,
//! generation, phase and chromosome index, so results are identical for any
//! worker count.

pub mod classical;
pub mod error;
pub mod exec;
pub mod fitness;
pub mod ga;
pub mod model;
pub mod quantum;
pub mod rng;
pub mod sweep;

pub use classical::{mutate_patient_ids, mutate_statuses, repair_chromosome, run_classical, run_classical_with};
pub use error::Error;
pub use exec::Execution;
pub use fitness::{count_occurrences, evaluate, evaluate_breakdown, Counts, FitnessBreakdown, ScoreTable};
pub use ga::{
    crossover_step, select, single_point_crossover, Algorithm, BestEver, GaParams, GenerationRecord,
    RunResult,
};
pub use model::{
    parse_episodes, parse_runs, random_chromosome, Chromosome, Episode, GantryStatus, PatientId,
    ProblemSpec, Run, SlotCell,
};
pub use quantum::{
    amplify, observe, q_evaluate, q_mutate, q_repair, q_single_point_crossover, qubit_estimate,
    run_quantum, run_quantum_with, sample_index, uniform_quantum_chromosome, AmplitudeVector,
    QuantumChromosome, QuditCell,
};
pub use rng::Stream;
