use hillvallea::amalgam::{
    convergence_rate, generation_step, init_from_cluster, time_to_optimum, time_to_optimum_from_window, TARGET_GAP,
};
use hillvallea::hillvalley::{cluster_population, hill_valley_test, Cluster};
use hillvallea::orchestrator::{archive_insert, postprocess_archive, ElitistArchive, RestartSchedule, POSTPROCESS_TOLERANCE};
use hillvallea::scoring::score_with;
use hillvallea::{benchmarks, run_hillvallea, BudgetedEvaluator, ProblemSpec, Solution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn double_well(budget: u64) -> BudgetedEvaluator {
    BudgetedEvaluator::new(ProblemSpec::minimize("double well", vec![-2.0, -2.0], vec![2.0, 2.0], budget, |x| {
        (x[0] * x[0] - 1.0).powi(2) + x[1] * x[1]
    }))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rate_estimate_matches_geometric_decay(
        delta0 in 1e-6f64..1e3,
        r in 0.001f64..0.9,
        offset in 0i32..50,
        n in 1usize..10,
    ) {
        let then = delta0 * (1.0 - r).powi(offset);
        let now = then * (1.0 - r).powi(n as i32);
        prop_assert!((convergence_rate(then, now, n) - r).abs() < 1e-9);
    }

    #[test]
    fn time_to_optimum_brackets_target(delta in 1e-9f64..1e3, r in 0.01f64..0.9) {
        let tto = time_to_optimum(delta, r);
        let at = |k: f64| delta * (1.0 - r).powf(k);
        prop_assert!(at(tto.ceil()) <= TARGET_GAP * (1.0 + 1e-9));
        prop_assert!(at(tto.floor()) >= TARGET_GAP * (1.0 - 1e-9));
        let window = time_to_optimum_from_window(delta / (1.0 - r).powi(5), delta, 5);
        prop_assert!((window - tto).abs() <= 1e-6 * tto.abs().max(1.0));
    }

    #[test]
    fn hill_valley_is_symmetric_on_unimodal(a in prop::array::uniform2(-3.0f64..3.0), b in prop::array::uniform2(-3.0f64..3.0), n in 1usize..8) {
        let spec = ProblemSpec::minimize("bowl", vec![-3.0; 2], vec![3.0; 2], 100, |x| x[0] * x[0] + 4.0 * x[1] * x[1]);
        let mut e = BudgetedEvaluator::new(spec);
        let sa = Solution::new(a.to_vec(), e.spec().internal_value(&a));
        let sb = Solution::new(b.to_vec(), e.spec().internal_value(&b));
        prop_assert!(hill_valley_test(&sa, &sb, n, &mut e).unwrap().same_niche);
        prop_assert!(hill_valley_test(&sb, &sa, n, &mut e).unwrap().same_niche);
    }

    #[test]
    fn clustering_partitions_population(seed in any::<u64>(), n in 1usize..80) {
        let mut e = double_well(1_000_000);
        let pop = e.uniform_init(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let before = e.used();
        let clusters = cluster_population(&pop, &mut e).unwrap();
        let spent = e.used() - before;

        let members: Vec<&Solution> = clusters.iter().flat_map(|c| &c.members).collect();
        for s in &pop {
            prop_assert_eq!(members.iter().filter(|m| **m == s).count(), 1);
        }
        let accepted = members.len() - pop.len();
        prop_assert!(accepted as u64 <= spent);
        for c in &clusters {
            let best = c.members.iter().map(|s| s.f).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(c.best().f, best);
        }
    }

    #[test]
    fn core_search_best_never_worsens(seed in any::<u64>()) {
        let mut e = double_well(100_000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = e.uniform_init(6, &mut rng).unwrap();
        let cluster = Cluster::from_members(members).unwrap();
        let mut state = init_from_cluster(&cluster, 12, &mut e, &mut rng).unwrap();
        let mut last = state.best.f;
        for _ in 0..40 {
            generation_step(&mut state, &mut e, &mut rng).unwrap();
            prop_assert!(state.best.f <= last);
            prop_assert!(state.population.iter().all(|s| e.spec().contains(&s.x)));
            last = state.best.f;
        }
    }

    #[test]
    fn archive_best_is_monotone(xs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..30)) {
        let mut e = double_well(1_000_000);
        let mut a = ElitistArchive::new();
        let mut best = f64::INFINITY;
        for (i, (x, y)) in xs.into_iter().enumerate() {
            let s = e.evaluate(vec![x, y]).unwrap();
            archive_insert(&mut a, s, i as u64, &mut e);
            let b = a.best_fitness().unwrap();
            prop_assert!(b <= best);
            best = b;
            let min = a.elites().iter().map(|s| s.f).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(b, min);
        }
        for s in postprocess_archive(&a) {
            prop_assert!(a.elites().contains(&s));
            prop_assert!(s.f <= best + POSTPROCESS_TOLERANCE);
        }
    }

    #[test]
    fn score_ignores_order(perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(), noise in prop::collection::vec(-1e-6f64..1e-6, 5)) {
        let spec = benchmarks::get_problem(2).unwrap();
        let reported: Vec<Solution> = spec
            .known_optima
            .iter()
            .zip(&noise)
            .map(|(x, n)| {
                let x = vec![x[0] + n];
                let f = spec.published_value(&x);
                Solution::new(x, f)
            })
            .collect();
        let shuffled: Vec<Solution> = perm.iter().map(|&i| reported[i].clone()).collect();
        let a = score_with(&reported, &spec, 1e-5, spec.niche_radius);
        let b = score_with(&shuffled, &spec, 1e-5, spec.niche_radius);
        prop_assert_eq!(a, b);
        prop_assert!(a.peaks_found <= spec.num_global_optima.min(reported.len()));
    }

    #[test]
    fn score_is_monotone_in_tolerances(xs in prop::collection::vec(0.0f64..1.0, 0..12), e1 in 1e-5f64..1e-2, e2 in 1e-5f64..1e-2) {
        let spec = benchmarks::get_problem(2).unwrap();
        let reported: Vec<Solution> = xs.iter().map(|&x| Solution::new(vec![x], spec.published_value(&[x]))).collect();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let tight = score_with(&reported, &spec, lo, 0.01);
        let loose = score_with(&reported, &spec, hi, 0.05);
        prop_assert!(tight.peaks_found <= loose.peaks_found);
        prop_assert!(loose.peaks_found <= spec.num_global_optima);
    }
}

#[test]
fn restart_schedule_grows_geometrically() {
    for d in 1..=5 {
        let mut s = RestartSchedule::new(d);
        assert_eq!(s.pop_size, 64 * d);
        for round in 1..8 {
            s.advance();
            assert_eq!(s.round, round);
            assert_eq!(s.pop_size, (64 * d) << round);
        }
    }
}

#[test]
fn runs_are_reproducible() {
    for id in [1, 4, 6] {
        let spec = benchmarks::get_problem(id).unwrap();
        let a = run_hillvallea(&spec, 11);
        let b = run_hillvallea(&spec, 11);
        assert_eq!(a, b);
        assert!(a.evaluations <= spec.budget);
    }
}

#[test]
fn reported_solutions_are_near_best() {
    let spec = benchmarks::get_problem(6).unwrap();
    let report = run_hillvallea(&spec, 3);
    let best = report.solutions.iter().map(|s| s.f).fold(f64::NEG_INFINITY, f64::max);
    assert!(!report.solutions.is_empty());
    for s in &report.solutions {
        assert!(s.f >= best - POSTPROCESS_TOLERANCE);
        assert!(spec.contains(&s.x));
        assert_eq!(s.f, spec.published_value(&s.x));
    }
}
