mod common;

use halfspace_core::evaluation::{disagreement, mc_error};
use halfspace_core::geometry::{angle, Hyperplane, Instance};
use halfspace_core::learners::{
    fill_band, localize, repeat_and_validate, train_averaging, train_kearns_li, train_poly_regression, BandOracle,
    HingeBandOracle, KearnsLiConfig, LocalizationSchedule, PolyHingeBandOracle, RoundParams, ScheduleMode,
};
use halfspace_core::solvers::HingeConfig;
use halfspace_core::synthdata::{
    generate, random_unit, sample_marginal, AdversarialStrategy, MarginalSpec, NoiseSpec, RateFn, StreamSampler,
};
use halfspace_core::experiment::{run_sweep, SweepPlan};

fn band_points(m: &MarginalSpec, w: &Hyperplane, gamma: f64, seed: u64) -> Vec<Instance> {
    sample_marginal(m, 200_000, seed)
        .into_iter()
        .filter(|x| halfspace_core::geometry::dot(w, x).abs() <= gamma)
        .collect()
}

#[test]
fn localize_learns_realizable_gaussians() {
    let m = MarginalSpec::gaussian(10);
    let good = (1..=10)
        .filter(|&seed| {
            let ws = random_unit(10, seed);
            let s = generate(&m, &ws, &NoiseSpec::None, 2000, seed).unwrap();
            let w1 = train_averaging(&s).unwrap();
            let mut smp = StreamSampler::new(m, ws.clone(), NoiseSpec::None, seed).unwrap();
            smp.skip_to(2000);
            let sched = LocalizationSchedule::gaussian(ScheduleMode::Practical, 0.1).unwrap();
            let oracle = HingeBandOracle { quota: 4000, hinge: HingeConfig::default() };
            let out = localize(&mut smp, &sched, &oracle, &w1, 0.1).unwrap();
            mc_error(&out.w, &m, &ws, &NoiseSpec::None, 100_000, seed + 1000).unwrap().value <= 0.1
        })
        .count();
    assert!(good >= 8, "{good}/10");
}

#[test]
fn theory_schedule_runs_two_rounds() {
    let m = MarginalSpec::gaussian(5);
    let ws = random_unit(5, 2);
    let s = generate(&m, &ws, &NoiseSpec::None, 500, 2).unwrap();
    let w1 = train_averaging(&s).unwrap();
    let mut smp = StreamSampler::new(m, ws.clone(), NoiseSpec::None, 2).unwrap();
    smp.skip_to(500);
    let mut sched = LocalizationSchedule::gaussian(ScheduleMode::Theory, 0.1).unwrap();
    sched.rounds = 2;
    let oracle = HingeBandOracle { quota: 2000, hinge: HingeConfig::default() };
    let out = localize(&mut smp, &sched, &oracle, &w1, 0.1).unwrap();
    assert_eq!(out.rounds.len(), 2);
    for r in &out.rounds {
        assert!(r.step_angle <= r.alpha + 1e-6);
        assert!(r.tau > 0.0 && r.gamma > 0.0);
    }
    assert!(angle(&out.w, &ws) < std::f64::consts::FRAC_PI_2);
}

#[test]
fn hinge_band_step_tracks_the_grid_minimizer() {
    let m = MarginalSpec::gaussian(2);
    let noise = NoiseSpec::Bounded { nu: 0.05, rate_fn: RateFn::Constant };
    let round = RoundParams { k: 1, alpha: 0.6, gamma: 0.5, tau: 0.25 };
    for seed in 0..5 {
        let ws = random_unit(2, seed);
        let w = common::rotate(&ws, 0.3, seed);
        let smp = StreamSampler::new(m, ws.clone(), noise, seed).unwrap();
        let oracle = HingeBandOracle { quota: 2000, hinge: HingeConfig { iters: 1000, step_radius: 1.0 } };
        let step = oracle.refine(&mut smp.clone(), &w, &round, 0.1).unwrap();
        let band = fill_band(&mut smp.clone(), &w, round.gamma, 2000).unwrap();
        let (_, v) = common::hinge_grid_oracle(&band.samples, round.tau, [w[0], w[1]], round.alpha);
        let grid = Hyperplane::new(v.to_vec()).unwrap();
        let xs = band_points(&m, &w, round.gamma, seed + 100);
        let ours = disagreement(&step.w, &ws, &xs).unwrap();
        let reference = disagreement(&grid, &ws, &xs).unwrap();
        assert!(ours <= reference + 0.05, "seed {seed}: {ours} vs {reference}");
    }
}

#[test]
fn poly_hinge_band_step_under_bounded_noise() {
    let m = MarginalSpec::gaussian(3);
    let noise = NoiseSpec::Bounded { nu: 0.3, rate_fn: RateFn::Constant };
    let round = RoundParams { k: 1, alpha: 0.6, gamma: 0.5, tau: 0.25 };
    let good = (0..10)
        .filter(|&seed| {
            let ws = random_unit(3, seed);
            let w = common::rotate(&ws, 0.3, seed);
            let mut smp = StreamSampler::new(m, ws.clone(), noise, seed).unwrap();
            let oracle = PolyHingeBandOracle {
                quota: 4000,
                degree: 3,
                nu: 0.3,
                hinge: HingeConfig::default(),
                g_scale: 1.0,
                c0: 0.25,
            };
            let step = oracle.refine(&mut smp, &w, &round, 0.1).unwrap();
            let info = step.poly.unwrap();
            assert!(info.pseudo_disagreement <= step.hinge_objective.unwrap() + 1e-12);
            let xs = band_points(&m, &w, round.gamma, seed + 100);
            disagreement(&step.w, &ws, &xs).unwrap() <= 0.25
        })
        .count();
    assert!(good >= 8, "{good}/10");
}

#[test]
fn validation_picks_a_near_best_run() {
    let m = MarginalSpec::gaussian(3);
    let ws = random_unit(3, 9);
    let noise = NoiseSpec::AdversarialFlip { budget: 0.05, strategy: AdversarialStrategy::NearestBoundary };
    let trainer = |i: usize| train_poly_regression(&generate(&m, &ws, &noise, 1000, 100 + i as u64)?, 3);
    let validation = generate(&m, &ws, &noise, 5000, 99).unwrap();
    let picked = repeat_and_validate(trainer, 5, &validation).unwrap();
    let mc = |f: &halfspace_core::learners::PolyFit| mc_error(f, &m, &ws, &noise, 100_000, 7).unwrap().value;
    let best = (0..5).map(|i| mc(&trainer(i).unwrap())).fold(f64::INFINITY, f64::min);
    assert!(mc(&picked.model) <= best + 0.02);
    let single = repeat_and_validate(trainer, 1, &validation).unwrap();
    assert_eq!(single.model, trainer(0).unwrap());
}

#[test]
fn kearns_li_without_noise() {
    let m = MarginalSpec::gaussian(5);
    let ws = random_unit(5, 1);
    let mut smp = StreamSampler::new(m, ws.clone(), NoiseSpec::None, 1).unwrap();
    let cfg = KearnsLiConfig { epsilon: 0.2, delta: 0.2, repetition_cap: 20 };
    let out = train_kearns_li(&mut smp, &cfg).unwrap();
    assert_eq!(out.candidates, 20);
    assert!(mc_error(&out.model, &m, &ws, &NoiseSpec::None, 100_000, 2).unwrap().value <= 0.2);
}

#[test]
fn noiseless_sweep_learners_agree() {
    let plan = SweepPlan::from_json(
        r#"{
            "marginal": {"kind": "gaussian", "d": 5},
            "noise": {"kind": "adversarial_flip", "budget": [0.0], "strategy": "nearest_boundary"},
            "learners": ["averaging", "localize_hinge"],
            "schedule": {"quota": 2000},
            "n_train": 20000,
            "n_eval": 50000,
            "epsilon": 0.1,
            "seed": 0,
            "seeds": [1, 2, 3, 4]
        }"#,
    )
    .unwrap();
    let out = run_sweep(&plan);
    assert!(out.failures.is_empty());
    let mean = |name: &str| {
        let rows: Vec<_> = out.rows.iter().filter(|r| r.learner == name).collect();
        let e = rows.iter().map(|r| r.mc_error.unwrap()).sum::<f64>() / rows.len() as f64;
        (e, rows[0].ci_radius.unwrap())
    };
    let ((a, ca), (l, cl)) = (mean("averaging"), mean("localize_hinge"));
    assert!((a - l).abs() <= ca + cl, "{a} vs {l}");
}
