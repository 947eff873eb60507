use ewf_core::polytope::rational::{int, ratio, Rational};
use ewf_core::polytope::{
    chsh_value, chsh_variants, feasible_joint_4, feasible_joint_6, feasible_vertex_hull, fine_criterion,
    lift_witness_4_to_6, pair_vars, PairTargets,
};
use ewf_core::PairId;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Correlator recomputed from the raw table, independent of the library.
fn corr(t: &PairTargets, p: PairId) -> Rational {
    let tab = t.table(p);
    &tab[0][0] + &tab[1][1] - &tab[0][1] - &tab[1][0]
}

/// Every deterministic assignment of (A, B, C, D) keeps all eight CHSH forms
/// within [-2, 2]; checked by enumeration.
#[test]
fn deterministic_vertices_satisfy_chsh() {
    for bits in 0..16u32 {
        let v: Vec<i64> = (0..4).map(|k| if bits >> (3 - k) & 1 == 0 { 1 } else { -1 }).collect();
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        // CHSH order: AC, BC, BD, AD
        let e = [a * c, b * c, b * d, a * d];
        let total: i64 = e.iter().sum();
        for k in 0..4 {
            let s = total - 2 * e[k];
            assert!(s.abs() <= 2, "vertex {bits:04b} gives {s}");
        }
    }
}

#[test]
fn tsirelson_value_and_verdicts() {
    let t = PairTargets::tsirelson();
    let s = chsh_value(&t);
    assert_eq!(s, ratio(4 * 707_107, 1_000_000));
    assert!((ewf_core::polytope::rational::to_f64(&s) - 2.0 * 2f64.sqrt()).abs() < 1e-5);
    assert!(!feasible_joint_4(&t).feasible);
    assert!(!feasible_joint_6(&t).feasible);
}

fn means() -> impl Strategy<Value = i64> {
    // twelfths in [-1, 1], weighted toward unbiased marginals
    prop_oneof![3 => Just(0i64), 2 => -12i64..=12]
}

/// Random valid targets on a small-denominator grid: each correlator lies in
/// the range that keeps its table non-negative.
fn targets() -> impl Strategy<Value = PairTargets> {
    (prop::array::uniform4(means()), prop::array::uniform4(0i64..=24)).prop_map(|(m, j)| {
        let m: [Rational; 4] = m.map(|k| ratio(k, 12));
        let e: [Rational; 4] = std::array::from_fn(|i| {
            let p = PairId::ALL[i];
            let (x, y) = pair_vars(p);
            let (x, y) = (x.index(), y.index());
            let lo = (&m[x] + &m[y]).abs() - int(1);
            let hi = int(1) - (&m[x] - &m[y]).abs();
            &lo + (&hi - &lo) * ratio(j[i], 24)
        });
        PairTargets::from_moments(&m, &e).expect("correlators kept in range")
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn all_methods_agree(t in targets()) {
        let v4 = feasible_joint_4(&t);
        let v6 = feasible_joint_6(&t);
        let fine = fine_criterion(&t);
        prop_assert_eq!(v4.feasible, fine);
        prop_assert_eq!(v6.feasible, fine);
        prop_assert_eq!(feasible_vertex_hull(&t), fine);

        let e = PairId::CHSH_ORDER.map(|p| corr(&t, p));
        let total: Rational = e.iter().sum();
        let oracle = (0..4).all(|k| (&total - int(2) * &e[k]).abs() <= int(2));
        prop_assert_eq!(oracle, fine);
        prop_assert_eq!(chsh_variants(&t)[3].clone(), chsh_value(&t));

        if fine {
            let w4 = v4.witness.expect("witness");
            let w6 = v6.witness.expect("witness");
            prop_assert!(w4.reproduces(&t));
            prop_assert!(w6.reproduces(&t));
            prop_assert!(lift_witness_4_to_6(&w4).unwrap().reproduces(&t));
        } else {
            prop_assert!(v4.max_violation.expect("violation").0.is_positive());
            prop_assert!(v6.max_violation.expect("violation").0.is_positive());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn mixing_toward_uniform_preserves_feasibility(t in targets(), k in 0i64..=10) {
        prop_assume!(fine_criterion(&t));
        let mixed = t.mix_uniform(&ratio(k, 10)).unwrap();
        prop_assert!(feasible_joint_4(&mixed).feasible);
        if k.is_zero() {
            prop_assert_eq!(mixed, PairTargets::uniform());
        }
    }
}
