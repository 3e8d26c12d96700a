use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use qcat_core::completeness::radial_moment_grid;
use qcat_core::fockspace::TruncatedSpace;
use qcat_core::observables::{squeezing_scan, Convention, Predicate};
use qcat_core::states::{u1_project, Parity};
use qcat_core::{Exec, QContext};

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("j_negative_scan");
    for exec in MODES {
        let ctx = QContext::new(0.5).unwrap().with_exec(exec);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &ctx, |b, ctx| {
            b.iter(|| squeezing_scan(ctx, 1, Predicate::JNegative(Convention::Scaled), 0.0, 10.0, 1e-3).unwrap())
        });
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("u1_projection");
    let space = TruncatedSpace::new(30).unwrap();
    let (xi1, xi2) = (Complex64::from_polar(1.1, 0.2), Complex64::from_polar(0.7, -0.4));
    for exec in MODES {
        let ctx = QContext::new(0.7).unwrap().with_exec(exec);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &ctx, |b, ctx| {
            b.iter(|| u1_project(ctx, xi1, xi2, 2, Parity::Even, space).unwrap())
        });
    }
    g.finish();
}

fn moments(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial_moments");
    for exec in MODES {
        let ctx = QContext::new(0.9).unwrap().with_exec(exec);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &ctx, |b, ctx| {
            b.iter(|| radial_moment_grid(ctx, 6, &[-4, -3, -2, -1, 0, 1, 2, 3, 4]).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, scan, projection, moments);
criterion_main!(benches);
