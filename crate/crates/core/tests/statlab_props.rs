use ewf_core::scenarios::{lf_born_tables, BornTable, LFConfig};
use ewf_core::statlab::{chsh_estimate, total_variation, PairCounts, Probabilities};
use ewf_core::{PairId, Sign};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample_table(t: &BornTable, n: u64, rng: &mut impl Rng) -> PairCounts {
    let mut c = PairCounts::default();
    for _ in 0..n {
        let u: f64 = rng.random();
        let (mut acc, mut cell) = (0.0, (Sign::Minus, Sign::Minus));
        'outer: for x in Sign::BOTH {
            for y in Sign::BOTH {
                acc += t[x.index()][y.index()];
                if u < acc {
                    cell = (x, y);
                    break 'outer;
                }
            }
        }
        c.add(cell.0, cell.1);
    }
    c
}

#[test]
fn chsh_estimator_is_consistent() {
    let born = lf_born_tables(&LFConfig::default()).unwrap();
    let analytic = 2.0 * 2f64.sqrt();
    let seeds = 0..8u64;
    let mut mean_err = Vec::new();
    for n in [1_000u64, 10_000, 100_000] {
        let mut total = 0.0;
        for seed in seeds.clone() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tables = PairId::CHSH_ORDER.map(|p| sample_table(&born[p.index()], n, &mut rng));
            let s = chsh_estimate(&tables).unwrap();
            let err = (s.value - analytic).abs();
            assert!(err <= 4.0 * s.stderr, "n={n} seed={seed}: {err} vs {}", s.stderr);
            total += err;
        }
        mean_err.push(total / seeds.clone().count() as f64);
    }
    assert!(mean_err.windows(2).all(|w| w[1] <= w[0]), "{mean_err:?}");
    assert!((mean_err[2]) < 0.05);
}

fn dist(k: usize) -> impl Strategy<Value = Probabilities> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", move |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| {
            Probabilities::new((0..k).map(|i| i.to_string()).collect(), w.iter().map(|x| x / total).collect()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn tv_is_a_metric(p in dist(5), q in dist(5), r in dist(5)) {
        let pq = total_variation(&p, &q).unwrap();
        prop_assert!((pq - total_variation(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert!(pq <= total_variation(&p, &r).unwrap() + total_variation(&r, &q).unwrap() + 1e-12);
        prop_assert!(total_variation(&p, &p).unwrap() == 0.0);
    }
}
