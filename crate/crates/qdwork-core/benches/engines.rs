//! Two comparisons: the localization engine against the dense oracle on
//! matched instances, and parallel against sequential execution of a mixed
//! sweep grid.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdwork_core::statements::{verify_q, Engine, QParams, VerifyOptions};
use qdwork_core::sweep::{parse_sweep_config, run_sweep};
use qdwork_core::ExecMode;

fn engine_comparison(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    group.sample_size(20);
    let instances = [
        ("Q-H2A", 9u64, 1u32),  // single cyclotomic factor, small
        ("Q-TAU", 13, 1),       // full-range sum, small
        ("Q-MAIN1", 5, 2),      // two-level tower: dense pays for the full product
    ];
    for (id, n, r) in instances {
        let params = QParams {
            n,
            r,
            ..QParams::n(n)
        };
        for engine in [Engine::Local, Engine::Dense] {
            let opts = VerifyOptions {
                engine,
                ..VerifyOptions::default()
            };
            group.bench_with_input(
                BenchmarkId::new(format!("{id}-n{n}-r{r}"), engine.as_str()),
                &params,
                |b, params| b.iter(|| verify_q(id, params, &opts).unwrap()),
            );
        }
    }
    group.finish();
}

fn exec_mode_comparison(c: &mut Criterion) {
    let cfg = parse_sweep_config(
        "statements = Q-H2A, Q-GPZ, Q-TAU, P-RV, P-H2\n\
         q.n = 3,5,7,9,11,13\n\
         p.p = 3,5,7,11,13\n",
    )
    .unwrap();
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    for (label, mode) in [
        ("parallel", ExecMode::Parallel),
        ("sequential", ExecMode::Sequential),
    ] {
        group.bench_function(label, |b| b.iter(|| run_sweep(&cfg, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, engine_comparison, exec_mode_comparison);
criterion_main!(benches);
