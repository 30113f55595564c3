use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qcomplexity::mps::{MpsState, Window};
use qcomplexity::sweep::{sweep_rows, SweepConfig};
use qcomplexity::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn word_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("word_distribution");
    for len in [8, 12] {
        let win = Window::centered(40, len).unwrap();
        let state = MpsState::random(40, 2, 16, 7)
            .and_then(|s| s.canonicalize(win.start()))
            .unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, len), &len, |b, _| {
                b.iter(|| black_box(state.word_distribution_with(win, exec).unwrap()))
            });
        }
    }
    group.finish();
}

// small enough that a single DMRG run is a few milliseconds
const GRID: &str = "
[model]
name = ising
N = 16

[grid]
coupling = 0.25, 0.5, 0.75, 1.0
theta = 0, pi/2
L = 1, 2

[dmrg]
chi = 8
";

fn sweep_grid(c: &mut Criterion) {
    let cfg = SweepConfig::parse(GRID).unwrap();
    let mut group = c.benchmark_group("sweep_rows");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| black_box(sweep_rows(&cfg, exec))));
    }
    group.finish();
}

criterion_group!(benches, word_tables, sweep_grid);
criterion_main!(benches);
