use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use warplab_bench::{kernel_problem, sphere_ball};
use warplab_core::elliptic::{harmonic_on_lattice, radial_green, solve_mode, BoundaryData, EvalLattice};
use warplab_core::parabolic::{heat_solve_radial, li_yau_scan, LiYauQuantity, ScanWindow};

fn modes(c: &mut Criterion) {
    let ball = sphere_ball(2, 1024);
    let mut g = c.benchmark_group("solve_mode");
    for k in [1usize, 16, 64] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| solve_mode(black_box(&ball), k).unwrap())
        });
    }
    g.finish();
}

fn harmonic(c: &mut Criterion) {
    let ball = sphere_ball(2, 1024);
    let data = BoundaryData::PoissonKernel { pole: 0.0 };
    c.bench_function("harmonic_on_lattice/poisson_k64", |b| {
        b.iter(|| harmonic_on_lattice(black_box(&ball), &data, 64, EvalLattice::default()).unwrap())
    });
}

fn green(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial_green");
    for m in [512usize, 2048] {
        let ball = sphere_ball(3, m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &ball, |b, ball| {
            b.iter(|| radial_green(black_box(ball)).unwrap())
        });
    }
    g.finish();
}

fn heat(c: &mut Criterion) {
    let mut g = c.benchmark_group("heat");
    g.sample_size(20);
    for (intervals, steps) in [(128usize, 40usize), (256, 80)] {
        let p = kernel_problem(3, intervals, steps);
        g.bench_with_input(BenchmarkId::new("solve", intervals), &p, |b, p| {
            b.iter(|| heat_solve_radial(black_box(p)).unwrap())
        });
    }
    let field = heat_solve_radial(&kernel_problem(3, 128, 40)).unwrap();
    g.bench_function("li_yau_scan/128", |b| {
        b.iter(|| li_yau_scan(black_box(&field), LiYauQuantity::LiYau, ScanWindow::Auto, 0.0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, modes, harmonic, green, heat);
criterion_main!(benches);
