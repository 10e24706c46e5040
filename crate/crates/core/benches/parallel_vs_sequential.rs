use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stableforms::enumeration::vectors_of_norm_with;
use stableforms::fourier::{Engine, EngineConfig};
use stableforms::par::Budget;
use stableforms::qforms::{make_e8, make_e8e8};
use stableforms::Execution;

const MODES: [(&str, Execution); 2] = [("Sequential", Execution::Sequential), ("Parallel", Execution::Parallel)];

fn shells(c: &mut Criterion) {
    let q = make_e8e8();
    let mut group = c.benchmark_group("norm4_shell_e8e8");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| vectors_of_norm_with(&q, 4, exec, &Budget::unlimited()).unwrap().len())
        });
    }
    group.finish();
}

fn expansions(c: &mut Criterion) {
    let q = make_e8();
    let mut group = c.benchmark_group("theta_e8_genus3_trace6");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            // A fresh engine per iteration so no count is served from memory.
            b.iter(|| {
                let engine = Engine::new(EngineConfig {
                    execution: exec,
                    ..EngineConfig::default()
                });
                engine.theta_expansion(&q, 3, 6).unwrap().len()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, shells, expansions);
criterion_main!(benches);
