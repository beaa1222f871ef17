use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cellmode_bench::{driving_trace, training_instances};
use cellmode_core::classifier::{train, TreeParams};
use cellmode_core::features::extract_instances;
use cellmode_core::preprocess::{smooth_pingpong, SmoothingParams};
use cellmode_core::spectrum::dft;
use cellmode_core::synth::{generate_trace, SuiteParams};
use cellmode_core::trace::Mode;

fn bench_simulate(c: &mut Criterion) {
    let params = SuiteParams::default();
    c.bench_function("simulate_600s_driving", |b| {
        b.iter(|| generate_trace(black_box(&params), Mode::Driving).unwrap())
    });
}

fn bench_smooth(c: &mut Criterion) {
    let trace = driving_trace();
    let params = SmoothingParams::default();
    c.bench_function("smooth_600s", |b| {
        b.iter(|| smooth_pingpong(black_box(&trace), &params))
    });
}

fn bench_dft(c: &mut Criterion) {
    let signal_60: Vec<f64> = (0..60).map(|i| -80.0 + (i as f64 * 0.7).sin()).collect();
    let signal_64: Vec<f64> = (0..64).map(|i| -80.0 + (i as f64 * 0.7).sin()).collect();
    c.bench_function("dft_direct_60", |b| {
        b.iter(|| dft(black_box(&signal_60), 1.0).unwrap())
    });
    c.bench_function("dft_radix2_64", |b| {
        b.iter(|| dft(black_box(&signal_64), 1.0).unwrap())
    });
}

fn bench_features(c: &mut Criterion) {
    let trace = driving_trace();
    c.bench_function("extract_instances_600s", |b| {
        b.iter(|| extract_instances(black_box(&trace)))
    });
}

fn bench_train(c: &mut Criterion) {
    let instances = training_instances();
    let params = TreeParams::default();
    c.bench_function("train_cart", |b| {
        b.iter(|| train(black_box(&instances), &params, 0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_simulate,
    bench_smooth,
    bench_dft,
    bench_features,
    bench_train
);
criterion_main!(benches);
