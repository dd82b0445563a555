use criterion::{black_box, criterion_group, criterion_main, Criterion};
use smallprop::doubling::{doubling_index_cube, CubeIndexParams, FieldTarget};
use smallprop::fields::{harmonic_polynomial, CoefficientField, ScalarField};
use smallprop::geometry::{hausdorff_content, Cube, PointSet};
use smallprop::smallness::zero_set_measure;
use smallprop::solver::{solve_dirichlet, GridFunction};

fn bench_content(c: &mut Criterion) {
    let q = Cube::unit(2);
    let f = harmonic_polynomial(2, 3, 0).unwrap();
    let set = PointSet::from_predicate(&q, 257, |x| f.value(x).abs() < 0.01).unwrap();
    c.bench_function("hausdorff_content 257x257 sublevel mask", |b| {
        b.iter(|| hausdorff_content(black_box(&set), 1.5, set.default_depth()).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let q = Cube::unit(2);
    let exact = harmonic_polynomial(2, 3, 0).unwrap();
    let a = CoefficientField::identity(2);
    c.bench_function("solve_dirichlet identity 65x65", |b| {
        b.iter(|| solve_dirichlet(black_box(&a), &q, |x| exact.value(x), 65, 1e-10).unwrap())
    });
}

fn bench_cube_index(c: &mut Criterion) {
    let u = harmonic_polynomial(2, 3, 0).unwrap();
    let q = Cube::unit(2);
    let params = CubeIndexParams::default();
    c.bench_function("doubling_index_cube 17x17 centers", |b| {
        b.iter(|| doubling_index_cube(black_box(&u), &q, &params, FieldTarget::U).unwrap())
    });
}

fn bench_zero_set(c: &mut Criterion) {
    let q = Cube::unit(2);
    let f = harmonic_polynomial(2, 4, 0).unwrap();
    let u = GridFunction::sample(&q, 257, |x| f.value(x)).unwrap();
    c.bench_function("zero_set_measure 257x257", |b| {
        b.iter(|| zero_set_measure(black_box(&u), &q).unwrap())
    });
}

criterion_group!(
    benches,
    bench_content,
    bench_solve,
    bench_cube_index,
    bench_zero_set
);
criterion_main!(benches);
