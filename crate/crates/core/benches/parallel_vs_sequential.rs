use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ghcyl::exec::Exec;
use ghcyl::solver::solve_tube_with;
use ghcyl::spectral::{forward_mixed_with, CylinderGrid, GridFunction};
use ghcyl::symbols::{ComplexPolynomial, OperatorSpec, TrigPolynomial, C64};
use ghcyl::zeroset::{certify_lower_bound_with, LowerBoundOptions};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn forcing(grid: CylinderGrid) -> GridFunction {
    GridFunction::from_fn(grid, |t, x| C64::new(t.cos() * (-x * x / 2.0).exp(), 0.0))
}

fn transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_mixed");
    for (m, n) in [(64, 512), (256, 2048)] {
        let f = forcing(CylinderGrid::new(m, n, 12.0).unwrap());
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, format!("{m}x{n}")), &f, |b, f| {
                b.iter(|| forward_mixed_with(black_box(f), exec))
            });
        }
    }
    group.finish();
}

fn tube_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_tube");
    group.sample_size(10);
    let b = TrigPolynomial::real_constant(1.0).add(&TrigPolynomial::cos(1.0));
    let q = TrigPolynomial::constant(C64::new(0.0, 0.3));
    let f = forcing(CylinderGrid::default());
    for (name, exec) in POLICIES {
        group.bench_function(name, |bch| {
            bch.iter(|| solve_tube_with(&TrigPolynomial::zero(), &b, &q, black_box(&f), exec).unwrap())
        });
    }
    group.finish();
}

fn lower_bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("certify_lower_bound");
    let op = OperatorSpec::const_split(
        ComplexPolynomial::new(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]),
        ComplexPolynomial::from_real(&[0.0, 0.0, 1.0]),
    );
    let opts = LowerBoundOptions::new(1.0, 200, 2000);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| certify_lower_bound_with(black_box(&op), opts, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, transform, tube_solve, lower_bound);
criterion_main!(benches);
