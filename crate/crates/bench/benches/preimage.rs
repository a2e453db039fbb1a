use criterion::{criterion_group, criterion_main, Criterion};
use polyinv::intervals::preimage_overapprox_box;
use polyinv::{
    forward_backward_contract, network_image, preimage_network, preimage_underapprox, Hyperbox,
    PolyUnion, SearchOrder,
};
use polyinv_bench::{network, CLASSIFIER, CLASSIFIER_LEAKY, PARABOLA, XOR};
use std::hint::black_box;

fn boxed(lo: &[f64], hi: &[f64]) -> Hyperbox {
    Hyperbox::new(lo.to_vec(), hi.to_vec()).unwrap()
}

fn exact(c: &mut Criterion) {
    let parabola = network(PARABOLA);
    let band = PolyUnion::from(boxed(&[100.0], &[105.0]).to_polyhedron());
    c.bench_function("preimage/parabola", |b| {
        b.iter(|| preimage_network(black_box(&band), &parabola).unwrap())
    });

    let classifier = network(CLASSIFIER);
    let target = PolyUnion::from(boxed(&[0.0, 0.0], &[0.5, 0.5]).to_polyhedron());
    c.bench_function("preimage/classifier", |b| {
        b.iter(|| preimage_network(black_box(&target), &classifier).unwrap())
    });
    c.bench_function("preimage_under/classifier_dfs", |b| {
        b.iter(|| preimage_underapprox(black_box(&target), &classifier, SearchOrder::DepthFirst).unwrap())
    });

    let square = boxed(&[0.0, 0.0], &[1.0, 1.0]).to_polyhedron();
    c.bench_function("image/classifier_unit_square", |b| {
        b.iter(|| network_image(&classifier, black_box(&square)).unwrap())
    });
}

fn intervals(c: &mut Criterion) {
    let leaky = network(CLASSIFIER_LEAKY);
    let target = PolyUnion::from(boxed(&[0.1, 0.1], &[0.3, 0.3]).to_polyhedron());
    c.bench_function("preimage_box/classifier_leaky", |b| {
        b.iter(|| preimage_overapprox_box(black_box(&target), &leaky).unwrap())
    });

    let xor = network(XOR);
    let x = boxed(&[0.0, 0.8], &[0.2, 1.0]);
    let y = boxed(&[0.0], &[1.0]);
    c.bench_function("contract/xor", |b| {
        b.iter(|| forward_backward_contract(&xor, black_box(&x), &y, 20).unwrap())
    });
}

criterion_group!(benches, exact, intervals);
criterion_main!(benches);
