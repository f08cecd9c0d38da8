//! Throughput benchmarks for the paths that dominate Monte Carlo runs.
//!
//! Run with `cargo bench -p specmon-bench`; add a filter like
//! `cargo bench -p specmon-bench monitor` for a single group.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use specmon_core::detector::{threshold_from_pfa, DetectorState};
use specmon_core::numerics::{complex_gaussian, fractional_resample, rng_from_seed};
use specmon_core::phy_tx::{build_frame, random_payload, synthesize};
use specmon_core::reference_config;

/// Streaming energy-ratio monitor over a 64k-sample noise stream.
fn monitor_ingest(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let samples: Vec<_> = (0..65_536).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    let gamma = threshold_from_pfa(0.025, 32).unwrap();

    let mut group = c.benchmark_group("monitor");
    group.throughput(Throughput::Elements(samples.len() as u64));
    group.bench_function("ingest_64k_n32", |b| {
        b.iter_batched(
            || {
                let mut det = DetectorState::new(32, gamma).unwrap();
                det.declare_idle(true);
                det
            },
            |mut det| {
                let mut detections = 0usize;
                for &z in &samples {
                    if let Some(d) = det.ingest(z).unwrap() {
                        detections += usize::from(d.pu_detected);
                    }
                }
                detections
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

/// Threshold inversion (regularized incomplete beta plus root search).
fn threshold_inversion(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form");
    for n in [32u32, 128] {
        group.bench_function(format!("threshold_from_pfa_n{n}"), |b| {
            b.iter(|| threshold_from_pfa(black_box(0.025), black_box(n)).unwrap())
        });
    }
    group.finish();
}

/// Sampling-clock offset emulation over a 16k-sample buffer.
fn resampling(c: &mut Criterion) {
    let mut rng = rng_from_seed(2);
    let input: Vec<_> = (0..16_384).map(|_| complex_gaussian(&mut rng, 1.0)).collect();

    let mut group = c.benchmark_group("resample");
    group.throughput(Throughput::Elements(input.len() as u64));
    group.bench_function("fractional_16k_100ppm", |b| {
        b.iter(|| fractional_resample(black_box(&input), 1.0 + 100e-6).unwrap())
    });
    group.finish();
}

/// Full-frame OFDM synthesis at the reference numerology (shortened frame).
fn frame_synthesis(c: &mut Criterion) {
    let (mut cfg, _) = reference_config();
    cfg.n_data_symbols = 16;
    let payload = random_payload(&cfg, 3).unwrap();
    let grid = build_frame(&cfg, &payload, 7).unwrap();

    let mut group = c.benchmark_group("phy_tx");
    let samples = (cfg.n_preambles + cfg.n_data_symbols) * cfg.symbol_len();
    group.throughput(Throughput::Elements(samples as u64));
    group.bench_function("synthesize_18_symbols", |b| {
        b.iter(|| synthesize(black_box(&grid), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, monitor_ingest, threshold_inversion, resampling, frame_synthesis);
criterion_main!(benches);
