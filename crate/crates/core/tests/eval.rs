use scrank::eval::{
    convergence_experiment, labeled, pr_sweep, precision_recall, score_histograms,
    uniqueness_experiment, write_convergence_csv, SweepPoint, DEFAULT_BURN_IN,
};
use scrank::synthgen::{bipartite_regular, generate};
use scrank::{
    unreciprocated, Executor, GeneratorParams, Init, IterationConfig, Parallelism, PlantedInstance,
    ScRank, TransferFunction,
};

fn desk() -> PlantedInstance {
    generate(&GeneratorParams::desk()).unwrap()
}

fn point(mu_s: f64) -> SweepPoint {
    SweepPoint {
        mu_c: 100.0,
        sigma_c: 25.0,
        mu_s,
        sigma_s: 25.0,
    }
}

#[test]
fn sweep_trades_recall_for_precision() {
    let inst = desk();
    let grid = [point(50.0), point(400.0)];
    let results = pr_sweep(
        &labeled(std::slice::from_ref(&inst)),
        &grid,
        IterationConfig::default(),
        0.5,
        &Executor::sequential(),
    )
    .unwrap();
    let (easy, hard) = (&results[0].pr.spammer, &results[1].pr.spammer);
    assert!(
        easy.recall >= hard.recall,
        "{} < {}",
        easy.recall,
        hard.recall
    );
    if let Some(p) = hard.precision {
        assert!(p > 0.95, "precision at a high threshold {p}");
    }
    assert!(results.iter().all(|r| r.converged));
}

#[test]
fn single_point_sweep_matches_direct_evaluation() {
    let inst = desk();
    let cfg = IterationConfig::default();
    let results = pr_sweep(
        &labeled(std::slice::from_ref(&inst)),
        &[point(100.0)],
        cfg,
        0.5,
        &Executor::sequential(),
    )
    .unwrap();
    assert_eq!(results.len(), 1);
    let arcs = unreciprocated(&inst.graph);
    let engine = ScRank::new(
        &arcs,
        TransferFunction::celebrity(100.0, 25.0).unwrap(),
        TransferFunction::spammer(100.0, 25.0).unwrap(),
    )
    .unwrap();
    let state = engine
        .iterate(IterationConfig {
            track_potential: false,
            ..cfg
        })
        .unwrap()
        .state;
    assert_eq!(
        results[0].pr,
        precision_recall(&state, &inst.truth, 0.5).unwrap()
    );
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let instances: Vec<PlantedInstance> = (1..=3)
        .map(|seed| {
            let p = GeneratorParams {
                n: 3000,
                n_c: 15,
                n_s: 40,
                ..GeneratorParams::desk()
            }
            .with_seed(seed);
            generate(&GeneratorParams {
                p_c: 500.0 / 3000.0,
                p_s: 500.0 / 3000.0,
                ..p
            })
            .unwrap()
        })
        .collect();
    let grid = [point(60.0), point(100.0), point(200.0)];
    let cfg = IterationConfig::default();
    let seq = pr_sweep(
        &labeled(&instances),
        &grid,
        cfg,
        0.5,
        &Executor::sequential(),
    )
    .unwrap();
    let par = pr_sweep(
        &labeled(&instances),
        &grid,
        cfg,
        0.5,
        &Executor::new(Parallelism::Threads(3)).unwrap(),
    )
    .unwrap();
    assert_eq!(seq, par);
    for r in &seq {
        for m in [r.pr.celebrity, r.pr.spammer] {
            // both sides count true positives
            assert!((m.recall * m.truth_size as f64 - m.true_positives as f64).abs() < 1e-9);
            if let Some(p) = m.precision {
                assert!((p * m.predicted as f64 - m.true_positives as f64).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn desk_convergence_series() {
    let inst = desk();
    let arcs = unreciprocated(&inst.graph);
    let engine = ScRank::new(
        &arcs,
        TransferFunction::celebrity(100.0, 25.0).unwrap(),
        TransferFunction::spammer(100.0, 25.0).unwrap(),
    )
    .unwrap();
    let reports =
        convergence_experiment(&engine, &Init::standard_set(1), 1e-6, 50, DEFAULT_BURN_IN).unwrap();
    assert_eq!(reports.len(), 4);
    for r in &reports {
        assert!(r.converged);
        let fit = r.decay.expect("enough points for a fit");
        assert!(fit.rate < 1.0, "{}: rate {}", r.init, fit.rate);
    }
    // random init behaves like the constant one-half
    let (half, rand) = (reports[2].l1_total(), reports[3].l1_total());
    assert_eq!(half.len(), rand.len());
    for (a, b) in half.iter().zip(&rand).skip(1) {
        assert!((a.log10() - b.log10()).abs() < 0.5, "{a:e} vs {b:e}");
    }
    let mut csv = Vec::new();
    write_convergence_csv(&mut csv, &reports).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut inits: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    inits.dedup();
    assert_eq!(inits, ["init 0", "init 1", "init 0.5", "init rand"]);
}

#[test]
fn bipartite_uniqueness_plateaus() {
    let arcs = bipartite_regular(500, 500).unwrap();
    let engine = ScRank::new(
        &arcs,
        TransferFunction::celebrity(100.0, 25.0).unwrap(),
        TransferFunction::spammer(100.0, 25.0).unwrap(),
    )
    .unwrap();
    let reports = uniqueness_experiment(
        &engine,
        &[(Init::Zero, Init::One), (Init::Zero, Init::Zero)],
        1e-6,
        50,
    )
    .unwrap();
    let plateau = &reports[0];
    assert!(plateau.both_converged);
    assert!(plateau.final_linf() > 0.5);
    let tail = &plateau.l1_total()[plateau.l1_c.len() - 2..];
    assert!(tail[1] > 100.0 && (tail[0] - tail[1]).abs() < 1e-3 * tail[1]);
    assert!(reports[1].l1_total().iter().all(|&d| d == 0.0));
}

#[test]
fn desk_histograms_are_bimodal() {
    let inst = desk();
    let arcs = unreciprocated(&inst.graph);
    let engine = ScRank::new(
        &arcs,
        TransferFunction::celebrity(100.0, 25.0).unwrap(),
        TransferFunction::spammer(100.0, 25.0).unwrap(),
    )
    .unwrap();
    let state = engine
        .iterate(IterationConfig {
            track_potential: false,
            ..Default::default()
        })
        .unwrap()
        .state;
    let hist = score_histograms(&state, &inst.truth, 20).unwrap();
    for (h, planted) in [
        (&hist.celebrity, inst.truth.celebrities.len()),
        (&hist.spammer, inst.truth.spammers.len()),
    ] {
        assert_eq!(h.all.iter().sum::<usize>(), state.len());
        assert_eq!(h.planted.iter().sum::<usize>(), planted);
        assert!(h.planted.iter().zip(&h.all).all(|(p, a)| p <= a));
        assert!(h.planted[19] as f64 >= 0.9 * planted as f64);
        assert!(h.all[0] as f64 >= 0.98 * state.len() as f64);
    }
}
