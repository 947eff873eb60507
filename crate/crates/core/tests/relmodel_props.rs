use ewf_core::relmodel::{presence_audit, simulate_batch, ChoicePolicy, RelModel, TrialBatch};
use ewf_core::scenarios::LFConfig;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn every_record_obeys_presence_and_product(seed in any::<u64>(), w in prop::array::uniform4(1u32..10), a in 0u32..360) {
        let total: u32 = w.iter().sum();
        let policy = ChoicePolicy::new(w.map(|x| x as f64 / total as f64)).unwrap();
        let cfg = LFConfig::new(a as f64, 90.0, 45.0, 135.0).unwrap();
        let batch = simulate_batch(&cfg, &policy, 500, seed).unwrap();
        let audit = presence_audit(&batch.records);
        prop_assert!(audit.pass);
        prop_assert_eq!(audit.runs, 500);
        let back = TrialBatch::records_from_jsonl(&batch.to_jsonl()).unwrap();
        prop_assert_eq!(back, batch.records);
    }
}

#[test]
fn born_tables_are_normalized() {
    let m = RelModel::new(LFConfig::default()).unwrap();
    for t in m.born_tables() {
        let s: f64 = t.iter().flatten().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
