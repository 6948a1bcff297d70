//! Criterion benches comparing the data-parallel paths (rayon, behind the
//! default `parallel` feature) with a hand-rolled sequential equivalent of
//! the same workload. Run with `--no-default-features` to time the fallback
//! dispatch as well.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hlqg::heisen;
use hlqg::linalg::CMat;
use hlqg::ncalg::NCPoly;
use hlqg::par;
use hlqg::quad::{PolarQuad, QuadSpec};
use num_complex::Complex64;

fn bench_heat_smearing(c: &mut Criterion) {
    let rep = heisen::build_irrep(2.0, Complex64::new(0.0, 0.0), 24);
    let spec = QuadSpec { radius: 7.5, n_radial: 48, n_angular: 64 };
    let grid = PolarQuad::new(&spec);
    let mut group = c.benchmark_group("heat_smearing");
    group.sample_size(10);
    group.bench_function("dispatched", |b| {
        b.iter(|| black_box(heisen::heat_smeared(&rep, 0.5, &spec)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let x = -rep.lambda / 2.0;
            let mut acc = CMat::zeros(rep.dim, rep.dim);
            for k in 0..grid.len() {
                let w = grid.weights[k] * heisen::heat_kernel(grid.nodes[k], x, 0.5);
                acc += heisen::displacement(&rep, grid.nodes[k], 0.0) * Complex64::new(w, 0.0);
            }
            black_box(acc)
        })
    });
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let spec = QuadSpec { radius: 7.5, n_radial: 96, n_angular: 128 };
    let grid = PolarQuad::new(&spec);
    let f = |z: Complex64| (Complex64::new(0.0, 1.0) * z.re - z.norm_sqr()).exp();
    let mut group = c.benchmark_group("oscillatory_integral");
    group.bench_function("dispatched", |b| b.iter(|| black_box(grid.integrate(f))));
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..grid.len() {
                acc += f(grid.nodes[k]) * grid.weights[k];
            }
            black_box(acc)
        })
    });
    group.finish();
}

fn bench_word_reduction(c: &mut Criterion) {
    // deterministic batch of degree-4 words over the 8 letters
    let words: Vec<Vec<u8>> = (0..200u32)
        .map(|k| (0..4).map(|j| ((k * 37 + j * 11 + 5) % 8) as u8).collect())
        .collect();
    let mut group = c.benchmark_group("word_reduction_batch");
    group.bench_function("dispatched", |b| {
        b.iter(|| {
            black_box(par::map_indexed(words.len(), |i| {
                NCPoly::reduce_word_directed(&words[i], true)
            }))
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            black_box(par::map_indexed_seq(words.len(), |i| {
                NCPoly::reduce_word_directed(&words[i], true)
            }))
        })
    });
    group.finish();
}

criterion_group!(benches, bench_heat_smearing, bench_quadrature, bench_word_reduction);
criterion_main!(benches);
