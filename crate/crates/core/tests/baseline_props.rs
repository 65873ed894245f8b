mod common;

use common::{close, minimizers, oracle_energy, random_qpbf, random_submodular, random_tree, rng};
use essp_core::baselines::{bp_min_sum, icm, qpbo, qpbo_improve, random_labeling, SolverOpts};
use essp_core::synth::{generate, FactorSpec};
use essp_core::{Label, Labeling, Qpbf};
use proptest::prelude::*;

fn one_flip_stable(f: &Qpbf, x: &Labeling) -> bool {
    let bits = x.bits().unwrap();
    let e = f.energy(&bits);
    (0..bits.len()).all(|u| {
        let mut y = bits.clone();
        y[u] = !y[u];
        f.energy(&y) >= e - 1e-9
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn qpbo_labels_persist(seed in any::<u64>(), n in 1usize..=15) {
        let f = random_qpbf(&mut rng(seed), n, 0.5);
        let partial = qpbo(&f);
        let (_, set) = minimizers(&f);
        let agrees = |x: &Vec<bool>| (0..n).all(|u| partial.get(u).bit().is_none_or(|b| b == x[u]));
        prop_assert!(set.iter().any(agrees), "labels {} match no minimizer", partial);
    }

    #[test]
    fn qpbo_solves_submodular_instances(seed in any::<u64>(), n in 1usize..=15) {
        let f = random_submodular(&mut rng(seed), n, 0.5);
        let x = qpbo(&f);
        prop_assert!(x.is_complete());
        let (min, _) = minimizers(&f);
        prop_assert!(close(f.evaluate(&x).unwrap(), min));
    }

    #[test]
    fn bp_is_exact_on_trees(seed in any::<u64>(), n in 1usize..=12) {
        let f = random_tree(&mut rng(seed), n);
        let (x, e) = bp_min_sum(&f, &SolverOpts::default()).unwrap();
        let (min, _) = minimizers(&f);
        prop_assert_eq!(e, f.evaluate(&x).unwrap());
        prop_assert!(close(e, min), "bp {} vs optimum {}", e, min);
    }

    #[test]
    fn icm_descends_to_a_one_flip_optimum(seed in any::<u64>(), n in 1usize..=30) {
        let f = random_qpbf(&mut rng(seed), n, 0.5);
        let init = random_labeling(n, seed);
        let (x, e) = icm(&f, &init, &SolverOpts::default()).unwrap();
        prop_assert_eq!(e, f.evaluate(&x).unwrap());
        prop_assert!(e <= f.evaluate(&init).unwrap());
        prop_assert!(one_flip_stable(&f, &x));
    }

    #[test]
    fn qpbo_i_never_increases_energy(seed in any::<u64>(), n in 1usize..=30) {
        let f = random_qpbf(&mut rng(seed), n, 0.5);
        let init = random_labeling(n, seed);
        let opts = SolverOpts { seed, max_iterations: 20, ..SolverOpts::default() };
        let (x, e) = qpbo_improve(&f, &init, &opts).unwrap();
        prop_assert_eq!(e, f.evaluate(&x).unwrap());
        prop_assert!(e <= f.evaluate(&init).unwrap());
        let (y, _) = qpbo_improve(&f, &init, &opts).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn reported_energies_are_exact(seed in any::<u64>(), n in 1usize..=25) {
        let f = random_qpbf(&mut rng(seed), n, 0.5);
        let (x, e) = bp_min_sum(&f, &SolverOpts::default()).unwrap();
        prop_assert_eq!(e, f.energy(&x.bits().unwrap()));
        prop_assert!(close(e, oracle_energy(&f, &x.bits().unwrap())));
    }
}

#[test]
fn qpbo_i_is_exact_on_submodular_after_one_round() {
    for seed in 0..20 {
        let f = random_submodular(&mut rng(seed), 12, 0.5);
        let opts = SolverOpts { seed, max_iterations: 1, ..SolverOpts::default() };
        let (_, e) = qpbo_improve(&f, &random_labeling(12, seed), &opts).unwrap();
        assert!(close(e, minimizers(&f).0));
    }
}

#[test]
fn zero_rounds_return_the_init() {
    let f = random_qpbf(&mut rng(1), 10, 0.5);
    let init = random_labeling(10, 4);
    let (x, _) = qpbo_improve(&f, &init, &SolverOpts { max_iterations: 0, ..SolverOpts::default() }).unwrap();
    assert_eq!(x, init);
}

#[test]
fn qpbo_labels_everything_without_supermodular_edges() {
    for seed in 0..20 {
        let f = generate(&FactorSpec::new(15, 0.5, 0.0, 0.1, seed)).unwrap();
        let x = qpbo(&f);
        assert!(x.is_complete());
        assert!(close(f.evaluate(&x).unwrap(), minimizers(&f).0));
    }
}

#[test]
fn qpbo_on_the_frustrated_triangle() {
    let mut f = Qpbf::new(3);
    f.add_pairwise(0, 1, [0.0, 0.0, 0.0, -1.0]).unwrap();
    f.add_pairwise(0, 2, [0.0, 0.0, 0.0, -1.0]).unwrap();
    f.add_pairwise(1, 2, [0.0, 0.0, 0.0, 1.0]).unwrap();
    let x = qpbo(&f);
    let minimizers = [[true, true, false], [true, false, true]];
    for u in 0..3 {
        if let Some(b) = x.get(u).bit() {
            assert!(minimizers.iter().any(|m| m[u] == b));
        }
    }
}

#[test]
fn random_labeling_is_fair() {
    let x = random_labeling(100_000, 9);
    let ones = x.labels().iter().filter(|&&l| l == Label::One).count() as f64;
    assert!((0.49..=0.51).contains(&(ones / 100_000.0)));
    assert_eq!(random_labeling(0, 1).len(), 0);
    assert_eq!(random_labeling(64, 3), random_labeling(64, 3));
}

#[test]
fn icm_and_qpbo_i_descend_on_dense_instances() {
    for seed in 0..100 {
        let f = generate(&FactorSpec::new(40, 0.5, 0.5, 0.1, seed)).unwrap();
        let init = random_labeling(40, seed);
        let e0 = f.evaluate(&init).unwrap();
        let opts = SolverOpts { seed, max_iterations: 10, ..SolverOpts::default() };
        assert!(icm(&f, &init, &opts).unwrap().1 <= e0);
        assert!(qpbo_improve(&f, &init, &opts).unwrap().1 <= e0);
    }
}
