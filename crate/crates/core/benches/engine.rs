use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gantry_ga::exec::with_threads;
use gantry_ga::{
    evaluate_breakdown, random_chromosome, repair_chromosome, Algorithm, Execution, GaParams,
    ProblemSpec, ScoreTable, Stream,
};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn population(spec: &ProblemSpec, n: u64) -> Vec<gantry_ga::Chromosome> {
    (0..n).map(|i| random_chromosome(spec, &mut Stream::new(i))).collect()
}

fn evaluate_population(c: &mut Criterion) {
    let table = ScoreTable::default();
    let mut group = c.benchmark_group("evaluate_population");
    for (label, spec) in [
        ("medium", ProblemSpec::new(3, 12, 108).unwrap()),
        ("large", ProblemSpec::new(3, 72, 650).unwrap()),
    ] {
        let pop = population(&spec, 250);
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, label), &pop, |b, pop| {
                b.iter(|| exec.map(pop, |_, c| evaluate_breakdown(black_box(c), &table)))
            });
        }
    }
    group.finish();
}

fn repair_population(c: &mut Criterion) {
    let spec = ProblemSpec::new(3, 72, 650).unwrap();
    let pop = population(&spec, 250);
    let mut group = c.benchmark_group("repair_population");
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| {
            b.iter(|| exec.map(&pop, |_, c| repair_chromosome(black_box(c), &spec, &[])))
        });
    }
    group.finish();
}

fn short_runs(c: &mut Criterion) {
    let spec = ProblemSpec::new(3, 72, 650).unwrap();
    let table = ScoreTable::default();
    let mut group = c.benchmark_group("run_30_generations");
    group.sample_size(10);
    for (alg, base) in [
        (Algorithm::Classical, GaParams::large_classical()),
        (Algorithm::Quantum, GaParams::large_quantum()),
    ] {
        let params = GaParams { g_max: 30, ..base };
        for (mode, exec) in MODES {
            group.bench_function(BenchmarkId::new(mode, alg), |b| {
                b.iter(|| alg.run(&spec, &params, &table, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn thread_scaling(c: &mut Criterion) {
    let spec = ProblemSpec::new(3, 72, 650).unwrap();
    let table = ScoreTable::default();
    let pop = population(&spec, 250);
    let mut group = c.benchmark_group("evaluate_threads");
    for threads in [1, 2, 4, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            with_threads(Some(t), || {
                b.iter(|| Execution::Parallel.map(&pop, |_, c| evaluate_breakdown(c, &table)))
            })
        });
    }
    group.finish();
}

criterion_group!(benches, evaluate_population, repair_population, short_runs, thread_scaling);
criterion_main!(benches);
