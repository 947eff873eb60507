use ewf_core::hilbert::{
    apply, born_distribution, sample_outcome, FactorLayout, MeasurementSpec, Operator, StateVector,
};
use ewf_core::statlab::{total_variation, EmpiricalDist, Probabilities};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn layout() -> FactorLayout {
    FactorLayout::new([("p", 2), ("q", 3), ("r", 2)]).unwrap()
}

fn random_state(seed: u64) -> StateVector {
    // first column of a random unitary is a uniformly random unit vector
    let u = Operator::random_unitary(layout(), &mut ChaCha8Rng::seed_from_u64(seed));
    let amps: Vec<Complex64> = (0..u.dim()).map(|i| u.get(i, 0)).collect();
    StateVector::new(layout(), amps).unwrap()
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), which in 0usize..4) {
        let s = random_state(seed);
        let on: &[&str] = [&["p"][..], &["q"], &["r", "p"], &["p", "q", "r"]][which];
        let sub = layout().select(on).unwrap();
        let u = Operator::random_unitary(sub, &mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let out = apply(&u, &s, on).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn born_rule_sums_to_one_in_random_bases(seed in any::<u64>()) {
        let s = random_state(seed);
        let q = FactorLayout::single("q", 3).unwrap();
        let u = Operator::random_unitary(q, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(1)));
        let m = MeasurementSpec::from_basis(&u, &["0", "1", "2"]).unwrap().embed(s.layout()).unwrap();
        let d = born_distribution(&s, &m).unwrap();
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(d.iter().all(|(_, p)| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn sampling_matches_born_distribution() {
    let s = random_state(2024);
    let m = MeasurementSpec::computational("q", &["a", "b", "c"]).unwrap().embed(s.layout()).unwrap();
    let exact = born_distribution(&s, &m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let labels: Vec<String> = (0..100_000).map(|_| sample_outcome(&s, &m, &mut rng).unwrap().0).collect();
    let emp = EmpiricalDist::from_samples(&["a", "b", "c"], labels.iter().map(String::as_str)).unwrap();
    let exact =
        Probabilities::new(exact.iter().map(|(l, _)| l.clone()).collect(), exact.iter().map(|(_, p)| *p).collect())
            .unwrap();
    let tv = total_variation(&emp.probabilities(), &exact).unwrap();
    assert!(tv < 0.01, "TV {tv}");
}

#[test]
fn collapse_is_repeatable() {
    let s = random_state(5);
    let m = MeasurementSpec::along("p", 30.0).unwrap().embed(s.layout()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (label, post) = sample_outcome(&s, &m, &mut rng).unwrap();
    let again = born_distribution(&post, &m).unwrap();
    let p = again.iter().find(|(l, _)| *l == label).unwrap().1;
    assert!((p - 1.0).abs() < 1e-10);
}
