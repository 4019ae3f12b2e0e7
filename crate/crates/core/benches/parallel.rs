use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toeplab::verify::{sweep, VerifyOptions};
use toeplab::{BoolMatrix, Execution, ToeplitzSpec};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn multiply(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiply");
    for n in [512usize, 1024] {
        let a = BoolMatrix::from_fn(n, |i, j| (i * 31 + j * 17) % 97 < 3).unwrap();
        let b = ToeplitzSpec::new(n, &[1, 5, 9], &[2, 7])
            .unwrap()
            .build_matrix();
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |bench, _| {
                bench.iter(|| black_box(&a).multiply_with(black_box(&b), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn verify_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for n_max in [6usize, 7] {
        for (label, execution) in MODES {
            let opts = VerifyOptions {
                execution,
                ..VerifyOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(label, n_max), &n_max, |bench, &n_max| {
                bench.iter(|| black_box(sweep(n_max, false, &opts)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, multiply, verify_sweep);
criterion_main!(benches);
