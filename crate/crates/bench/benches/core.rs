use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ewf_core::hilbert::{apply, FactorLayout, Operator};
use ewf_core::polytope::{feasible_joint_4, feasible_joint_6, feasible_vertex_hull, PairTargets};
use ewf_core::relmodel::{simulate_batch_sharded, ChoicePolicy};
use ewf_core::scenarios::{build_lf_frame_relational_state, lf_born_tables, lf_circuit, names, LFConfig};
use ewf_core::Sign;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lp(c: &mut Criterion) {
    let tsirelson = PairTargets::tsirelson();
    let uniform = PairTargets::uniform();
    c.bench_function("joint_4 tsirelson", |b| b.iter(|| feasible_joint_4(&tsirelson)));
    c.bench_function("joint_6 tsirelson", |b| b.iter(|| feasible_joint_6(&tsirelson)));
    c.bench_function("joint_6 uniform", |b| b.iter(|| feasible_joint_6(&uniform)));
    c.bench_function("vertex hull tsirelson", |b| b.iter(|| feasible_vertex_hull(&tsirelson)));
}

fn states(c: &mut Criterion) {
    let cfg = LFConfig::default();
    c.bench_function("lf_circuit", |b| b.iter(|| lf_circuit(&cfg).unwrap()));
    c.bench_function("lf_born_tables", |b| b.iter(|| lf_born_tables(&cfg).unwrap()));
    let s = build_lf_frame_relational_state(Sign::Plus, Sign::Minus).unwrap();
    let layout = FactorLayout::qubits(&[names::A_ORIENT, names::C_ORIENT]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("orientation unitary on 64-dim state", |b| {
        b.iter_batched(
            || Operator::random_unitary(layout.clone(), &mut rng),
            |u| apply(&u, &s, &[names::A_ORIENT, names::C_ORIENT]).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn batches(c: &mut Criterion) {
    let cfg = LFConfig::default();
    let policy = ChoicePolicy::uniform();
    let mut g = c.benchmark_group("simulate 100k trials");
    g.sample_size(10);
    for shards in [1, 8] {
        g.bench_function(format!("{shards} shard(s)"), |b| {
            b.iter(|| simulate_batch_sharded(&cfg, &policy, 100_000, 7, shards).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lp, states, batches);
criterion_main!(benches);
