use gantry_ga::exec::with_threads;
use gantry_ga::quantum::amplify_in_place;
use gantry_ga::sweep::{build_grid, filter_records, run_sweep, summarize, Exclusion, SweepAxis, SweepGrid, SweepParam};
use gantry_ga::{
    count_occurrences, observe, q_mutate, q_repair, random_chromosome, repair_chromosome, Algorithm,
    Execution, GaParams, ProblemSpec, QuantumChromosome, ScoreTable, Stream,
};
use rand::Rng;

fn medium() -> ProblemSpec {
    ProblemSpec::new(3, 12, 108).unwrap()
}

#[test]
fn repair_zeroes_structural_penalties() {
    let spec = medium();
    for i in 0..1000 {
        let raw = random_chromosome(&spec, &mut Stream::new(i));
        let fixed = repair_chromosome(&raw, &spec, &[]);
        let c = count_occurrences(&fixed);
        assert_eq!(c.structural_penalties(), 0, "input {i}: {c:?}");
        assert_eq!(repair_chromosome(&fixed, &spec, &[]), fixed);
    }
}

#[test]
fn populations_respect_the_cap() {
    let spec = medium();
    let table = ScoreTable::default();
    // a generous survive ratio so the cap actually binds
    for (alg, base) in [
        (Algorithm::Classical, GaParams::medium_classical()),
        (Algorithm::Quantum, GaParams::medium_quantum()),
    ] {
        let params = GaParams { r_s: 1.0, r_c: 1.0, g_max: 15, ..base };
        let r = alg.run(&spec, &params, &table, Execution::Parallel).unwrap();
        assert_eq!(r.records.len(), params.g_max + 1);
        for rec in &r.records[..params.g_max] {
            assert!(rec.survivors.unwrap() <= params.n_max);
        }
        assert!(r.records.iter().any(|rec| rec.survivors == Some(params.n_max)), "{alg}: cap never reached");
    }
}

#[test]
fn best_ever_is_a_running_maximum() {
    let spec = medium();
    let table = ScoreTable::default();
    for alg in [Algorithm::Classical, Algorithm::Quantum] {
        let params = GaParams { g_max: 40, ..GaParams::medium_classical() }.with_seed(3);
        let r = alg.run(&spec, &params, &table, Execution::Parallel).unwrap();
        assert_eq!(r.best_ever_curve.len(), r.records.len());
        for (w, rec) in r.best_ever_curve.windows(2).zip(&r.records[1..]) {
            assert!(w[1] >= w[0]);
            assert!(w[1] >= rec.best_fitness);
        }
        assert_eq!(*r.best_ever_curve.last().unwrap(), r.best_fitness());
        let recount = gantry_ga::evaluate_breakdown(&r.best_ever.chromosome, &table);
        assert_eq!(recount, r.best_ever.breakdown);
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let spec = ProblemSpec::new(2, 5, 60).unwrap();
    let table = ScoreTable::default();
    let params = GaParams { g_max: 25, ..GaParams::medium_classical() }.with_seed(11);
    for alg in [Algorithm::Classical, Algorithm::Quantum] {
        let seq = alg.run(&spec, &params, &table, Execution::Sequential).unwrap();
        for threads in [1, 2, 7] {
            let par = with_threads(Some(threads), || alg.run(&spec, &params, &table, Execution::Parallel).unwrap());
            assert_eq!(seq.records, par.records, "{alg} with {threads} threads");
            assert_eq!(seq.best_ever, par.best_ever);
        }
    }
}

#[test]
fn observation_does_not_disturb_amplitudes() {
    let spec = ProblemSpec::new(2, 4, 30).unwrap();
    let mut q = QuantumChromosome::uniform(&spec);
    let mut rng = Stream::new(5);
    for _ in 0..20 {
        q_mutate(&mut q, &mut rng);
    }
    q_repair(&mut q, &spec, &mut rng);
    let before = q.clone();
    for _ in 0..100 {
        observe(&q, &mut rng);
    }
    assert_eq!(q, before);
}

#[test]
fn random_operation_sequences_stay_normalized() {
    let spec = ProblemSpec::new(2, 6, 40).unwrap();
    let mut q = QuantumChromosome::uniform(&spec);
    let mut rng = Stream::new(99);
    for _ in 0..10_000 {
        match rng.random_range(0..3) {
            0 => {
                let (g, t) = (rng.random_range(0..spec.n_g), rng.random_range(0..spec.n_t));
                let mut cell = q.cell(g, t);
                let mut ids = cell.id_state.clone().into_inner();
                amplify_in_place(&mut ids, rng.random_range(0..spec.n_p));
                cell.id_state = gantry_ga::AmplitudeVector::new(ids).unwrap();
                q.set_cell(g, t, &cell);
            }
            1 => q_mutate(&mut q, &mut rng),
            _ => {
                q_repair(&mut q, &spec, &mut rng);
            }
        }
    }
    assert!(q.max_norm_drift() <= 1e-6);
}

#[test]
fn sweep_is_reproducible_and_filterable() {
    let spec = ProblemSpec::new(2, 4, 60).unwrap();
    let table = ScoreTable::default();
    let base = GaParams { g_max: 10, ..GaParams::medium_classical() };
    let grid = SweepGrid {
        axes: vec![SweepAxis { param: SweepParam::Crossover, center: 0.27, half_width: 0.04, step: 0.02 }],
        exclude: vec![Exclusion { param: SweepParam::Crossover, values: vec![0.23] }],
    };
    let points = build_grid(&grid, &base).unwrap();
    assert_eq!(points.len(), 5);

    let run = |exec| -> Vec<_> {
        run_sweep(&spec, &points, &table, Algorithm::Classical, 42, exec)
            .into_iter()
            .map(Result::unwrap)
            .collect()
    };
    let a = run(Execution::Parallel);
    let b = run(Execution::Sequential);
    let fit = |v: &[gantry_ga::sweep::SweepRecord]| v.iter().map(|r| r.best_fitness).collect::<Vec<_>>();
    assert_eq!(fit(&a), fit(&b));

    let (kept, removed) = filter_records(a, &grid.exclude);
    assert_eq!(removed, 1);
    assert!(kept.iter().all(|r| r.params.r_c != 0.23));
    let s = summarize(&kept, 10).unwrap();
    assert_eq!(s.all.fitness.count, 4);
    assert!(s.top.fitness.mean >= s.all.fitness.mean);
}
