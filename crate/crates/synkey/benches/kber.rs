//! Benchmarks the Monte Carlo key pipeline sequentially and on the rayon
//! pool. Both paths produce bit-identical results (the per-block seeding
//! contract); this suite measures what the parallel feature buys.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use synkey::evalbench::{estimate_kber, KberConfig};
use synkey::ldpc::LdpcCode;
use synkey::sources::SourceModel;

fn kber_benchmark(c: &mut Criterion) {
    let model = SourceModel::model1(0.05).unwrap();
    let code = LdpcCode::regular(1000, 3, 6, 7).unwrap();
    let mut group = c.benchmark_group("kber_blocks");
    group.sample_size(10);
    for &blocks in &[32u64, 128] {
        group.bench_with_input(
            BenchmarkId::new("sequential", blocks),
            &blocks,
            |b, &blocks| {
                let cfg = KberConfig {
                    blocks,
                    max_iter: 60,
                    seed: 42,
                    threads: 1,
                };
                b.iter(|| estimate_kber(&model, &code, &cfg, "3,6").unwrap());
            },
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(
            BenchmarkId::new("parallel", blocks),
            &blocks,
            |b, &blocks| {
                let cfg = KberConfig {
                    blocks,
                    max_iter: 60,
                    seed: 42,
                    threads: 0,
                };
                b.iter(|| estimate_kber(&model, &code, &cfg, "3,6").unwrap());
            },
        );
    }
    group.finish();
}

criterion_group!(benches, kber_benchmark);
criterion_main!(benches);
