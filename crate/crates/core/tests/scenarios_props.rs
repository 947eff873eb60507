use ewf_core::hilbert::{FactorLayout, Operator, StateVector};
use ewf_core::scenarios::{
    apply_global_rotation, build_frame_relational_state, build_lf_frame_relational_state, build_rovelli_states,
    correlation, interference_witness, lf_circuit, names, observable_spec, orientation_branches, record_distribution,
    rovelli_record_labels, LFConfig, RovelliConfig,
};
use ewf_core::{PairId, Sign, Wing};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Case {
    state: StateVector,
    orient: Vec<&'static str>,
    records: Vec<(&'static str, Vec<&'static str>)>,
}

fn cases() -> Vec<Case> {
    let pm = vec!["P", "A"];
    let mut out = Vec::new();
    for o in Sign::BOTH {
        out.push(Case {
            state: build_frame_relational_state(o).unwrap(),
            orient: vec![names::A_ORIENT],
            records: vec![(names::A_RECORD, pm.clone())],
        });
        for c in Sign::BOTH {
            out.push(Case {
                state: build_lf_frame_relational_state(o, c).unwrap(),
                orient: vec![names::A_ORIENT, names::C_ORIENT],
                records: vec![(names::A_RECORD, pm.clone()), (names::C_RECORD, pm.clone())],
            });
        }
        for s in build_rovelli_states(&RovelliConfig { trigger: o }).unwrap() {
            out.push(Case {
                state: s,
                orient: vec![names::A_ORIENT],
                records: vec![(names::A_RECORD, rovelli_record_labels(o).to_vec())],
            });
        }
    }
    out
}

fn record_probs(s: &StateVector, records: &[(&str, Vec<&str>)]) -> Vec<f64> {
    records
        .iter()
        .flat_map(|(r, labels)| record_distribution(s, r, labels).unwrap().into_iter().map(|(_, p)| p))
        .collect()
}

#[test]
fn record_statistics_invariant_under_orientation_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in cases() {
        let before = record_probs(&case.state, &case.records);
        for _ in 0..100 {
            let layout = FactorLayout::qubits(&case.orient).unwrap();
            let u = Operator::random_unitary(layout, &mut rng);
            let rotated = apply_global_rotation(&case.state, &u).unwrap();
            let after = record_probs(&rotated, &case.records);
            for (a, b) in before.iter().zip(&after) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn frame_relational_states_are_coherent() {
    for case in cases() {
        let (b0, b1) = orientation_branches(&case.state, case.orient[0]).unwrap();
        let w = interference_witness(&case.state, &b0, &b1).unwrap();
        assert!((w - 1.0).abs() < 1e-10);
    }
}

#[test]
fn rotations_touching_records_are_rejected() {
    let s = build_frame_relational_state(Sign::Plus).unwrap();
    let u = Operator::pauli_x(names::A_RECORD).unwrap();
    assert!(apply_global_rotation(&s, &u).is_err());
}

fn angle() -> impl Strategy<Value = f64> {
    (0u32..3600).prop_map(|k| k as f64 / 10.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn lf_correlations_follow_angle_difference(a in angle(), b in angle(), c in angle(), d in angle()) {
        let cfg = LFConfig::new(a, b, c, d).unwrap();
        let s = lf_circuit(&cfg).unwrap();
        for p in PairId::ALL {
            let ma = observable_spec(&cfg, Wing::Alice, p.alice()).unwrap();
            let mc = observable_spec(&cfg, Wing::Chidi, p.chidi()).unwrap();
            let expected = (cfg.angle(Wing::Alice, p.alice()) - cfg.angle(Wing::Chidi, p.chidi())).to_radians().cos();
            prop_assert!((correlation(&s, &ma, &mc).unwrap() - expected).abs() < 1e-9);
        }
    }
}
