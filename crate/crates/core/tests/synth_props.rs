mod common;

use common::rng;
use essp_core::format::{from_text, to_text};
use essp_core::recipe::{trace_recipe, Recipe, RecipeOpts};
use essp_core::synth::{generate, measure_factors, FactorSpec};
use essp_core::{CharGraph, Labeling};
use proptest::prelude::*;
use rand::Rng;
use std::time::Duration;

fn random_spec(seed: u64) -> FactorSpec {
    let mut r = rng(seed);
    let n = r.random_range(5..60);
    let cr = r.random_range(0.05..0.9);
    let sr = r.random_range(0.0..=1.0);
    let ug = if r.random_bool(0.2) { 0.0 } else { r.random_range(0.01..2.0) };
    FactorSpec::new(n, cr, sr, ug, seed)
}

#[test]
fn factors_round_trip_over_fifty_specs() {
    let mut tested = 0;
    let mut seed = 0;
    while tested < 50 {
        seed += 1;
        let spec = random_spec(seed);
        if spec.validate().is_err() {
            continue;
        }
        tested += 1;
        let f = generate(&spec).unwrap();
        let m = measure_factors(&f);
        let e = spec.edge_count();
        let n = spec.n as f64;
        assert_eq!(m.cr, 2.0 * e as f64 / (n * n), "{spec:?}");
        assert!((m.sr - spec.sr).abs() * e as f64 <= 1.0, "{spec:?}: S_r {}", m.sr);
        if spec.ug == 0.0 {
            assert!(m.ug <= 1e-9, "{spec:?}: U_g {}", m.ug);
        } else {
            assert!((m.ug - spec.ug).abs() <= 0.02 * spec.ug, "{spec:?}: U_g {}", m.ug);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_instances_survive_the_text_format(seed in any::<u64>()) {
        let spec = random_spec(seed);
        prop_assume!(spec.validate().is_ok());
        let f = generate(&spec).unwrap();
        prop_assert_eq!(from_text(&to_text(&f)).unwrap(), f);
    }

    #[test]
    fn zero_supermodularity_means_no_negative_edges(seed in any::<u64>()) {
        let spec = FactorSpec { sr: 0.0, ..random_spec(seed) };
        prop_assume!(spec.validate().is_ok());
        let g = CharGraph::characterize(&generate(&spec).unwrap());
        prop_assert!(g.edges().all(|e| e.2 > 0.0));
    }

    #[test]
    fn traces_are_best_so_far(seed in any::<u64>(), which in 0usize..6) {
        let name = ["bp", "essp", "qpbo-i", "bp+essp", "rand+essp+i", "qpbo+essp"][which];
        let f = generate(&FactorSpec::new(30, 0.4, 0.4, 0.1, seed)).unwrap();
        let opts = RecipeOpts { seed, qpbo_i_rounds: 10, ..RecipeOpts::default() };
        let recipe: Recipe = name.parse().unwrap();
        let t = trace_recipe(&f, &recipe, &opts, "i", None).unwrap();
        prop_assert!(!t.samples.is_empty());
        prop_assert!(t.samples.windows(2).all(|w| w[0].time <= w[1].time && w[1].energy < w[0].energy));
        prop_assert_eq!(t.samples.last().unwrap().energy, t.final_energy);
        let x = Labeling::parse(&t.labeling).unwrap();
        prop_assert_eq!(f.evaluate(&x).unwrap(), t.final_energy);
    }
}

#[test]
fn essp_after_bp_never_loses_to_bp() {
    for seed in 0..10 {
        let f = generate(&FactorSpec::new(60, 0.5, 0.5, 0.1, seed)).unwrap();
        let opts = RecipeOpts { seed, ..RecipeOpts::default() };
        let bp = trace_recipe(&f, &"bp".parse().unwrap(), &opts, "i", None).unwrap();
        let chained = trace_recipe(&f, &"bp+essp".parse().unwrap(), &opts, "i", None).unwrap();
        assert!(chained.final_energy <= bp.final_energy);
    }
}

#[test]
fn budget_caps_the_run() {
    let f = generate(&FactorSpec::new(200, 0.5, 0.5, 0.1, 3)).unwrap();
    let opts = RecipeOpts {
        qpbo_i_rounds: 1_000_000,
        time_budget: Some(Duration::from_millis(300)),
        ..RecipeOpts::default()
    };
    let start = std::time::Instant::now();
    let t = trace_recipe(&f, &"qpbo-i".parse().unwrap(), &opts, "i", None).unwrap();
    assert!(start.elapsed() < Duration::from_millis(1500), "{:?}", start.elapsed());
    assert!(t.elapsed() <= start.elapsed().as_secs_f64());
}

#[test]
fn qpbo_recipe_reports_labeled_fraction() {
    let f = generate(&FactorSpec::new(20, 0.5, 0.0, 0.1, 1)).unwrap();
    let t = trace_recipe(&f, &"qpbo".parse().unwrap(), &RecipeOpts::default(), "i", None).unwrap();
    assert_eq!(t.labeled_fraction, Some(1.0));
}
