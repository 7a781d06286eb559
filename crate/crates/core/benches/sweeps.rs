use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use twistor_core::catalog::{self, Condition, Sweep};
use twistor_core::exec::Exec;
use twistor_core::trace::{parse_leaves, trace_leaves, SliceField, TraceOptions};
use twistor_core::FieldExpr;

fn verify_sweep(c: &mut Criterion) {
    let en = catalog::entry("quadric-circles").unwrap();
    let mut g = c.benchmark_group("verify-sfr");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let sweep = Sweep { samples: 500, exec, ..Sweep::default() };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &sweep, |b, s| {
            b.iter(|| black_box(en.verify(Condition::Sfr, s).unwrap()))
        });
    }
    g.finish();
}

fn trace(c: &mut Criterion) {
    let mu = FieldExpr::parse("(x0 + sqrt(x0^2 + x2^2 + x3^2))/(x2 - i*x3)").unwrap();
    let field = SliceField::new(&mu, 1.0).unwrap();
    let seeds = parse_leaves("1.2:2.5:8", 0.0).unwrap();
    let mut g = c.benchmark_group("trace-involutes");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = TraceOptions { steps: 400, exec, ..TraceOptions::default() };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &opts, |b, o| {
            b.iter(|| black_box(trace_leaves(&field, &seeds, o)))
        });
    }
    g.finish();
}

criterion_group!(benches, verify_sweep, trace);
criterion_main!(benches);
