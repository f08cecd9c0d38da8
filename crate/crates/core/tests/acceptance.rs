//! Acceptance checklist for the monitoring pipeline.
//!
//! Each test verifies one release gate end to end and prints a single
//! `acceptance NN <name>: PASS|FAIL [detail]` line before asserting, so a
//! full run reads as a checklist. Tolerances are pinned here, next to the
//! checks they guard; the statistical gates use fixed seeds, so a passing
//! run is reproducible rather than flaky.

use std::time::{Duration, Instant};

use specmon_core::channel::{apply_cfo, draw_channel, mix_scene, ChannelKind, ChannelProfile};
use specmon_core::detector::{
    pd_closed_form, pd_closed_form_fading, run_monitor, threshold_from_pfa, DetectorState,
};
use specmon_core::harness::{measure_detection_rate, measure_false_alarm_rate};
use specmon_core::numerics::{complex_gaussian, rng_from_seed};
use specmon_core::phy_tx::{
    build_frame, generate_primary, random_payload, schedule_reserved_tones, synthesize,
};
use specmon_core::rx_sync::{
    estimate_cfo_sfo_ls, estimate_sync, extract_reserved_tones, receive_frame, snrd_cfo, snrd_sfo,
};
use specmon_core::table::Table;
use specmon_core::{
    reference_config, run_experiment, ExperimentSpec, ImpairmentSpec, Scenario, SyncMode,
    WindowKind,
};

/// Prints the checklist line for one gate, then enforces it.
fn verdict(number: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {number:02} {name}: {status} [{detail}]");
    assert!(pass, "acceptance {number:02} {name} failed: {detail}");
}

fn column(table: &Table, name: &str) -> Vec<f64> {
    let idx = table
        .columns()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("missing column {name}"));
    table
        .rows()
        .iter()
        .map(|r| r[idx].parse::<f64>().unwrap())
        .collect()
}

fn text_column(table: &Table, name: &str) -> Vec<String> {
    let idx = table
        .columns()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("missing column {name}"));
    table.rows().iter().map(|r| r[idx].clone()).collect()
}

/// 01 — The empirical density of the ratio statistic over non-overlapping
/// window pairs matches the scaled-F closed form (N = 32, 5 dB variance
/// ratio, 1e5 pairs) with a Kolmogorov-Smirnov distance under 0.02, and the
/// whole run finishes within a minute.
#[test]
fn acceptance_01_statistic_density_matches_closed_form() {
    const KS_LIMIT: f64 = 0.02;
    const TIME_LIMIT: Duration = Duration::from_secs(60);

    let spec = ExperimentSpec::for_scenario(Scenario::PdfCheck);
    assert_eq!(spec.trials, 100_000);
    assert_eq!(spec.window_n, vec![32]);
    assert_eq!(spec.ratio_db, 5.0);

    let start = Instant::now();
    let table = run_experiment(&spec).unwrap();
    let elapsed = start.elapsed();

    let ks = column(&table, "ks_stat")[0];
    let pass = ks < KS_LIMIT && elapsed <= TIME_LIMIT;
    verdict(
        1,
        "statistic density matches closed form",
        pass,
        &format!("ks={ks:.5} (<{KS_LIMIT}), runtime={:.1}s (<=60s)", elapsed.as_secs_f64()),
    );
}

/// 02 — With noise-only input, the per-evaluation false-alarm rate over
/// non-overlapping evaluations stays within three binomial standard
/// deviations of its target for every (window, target) combination.
#[test]
fn acceptance_02_false_alarm_rate_is_calibrated() {
    const EVALS: usize = 10_000;

    let mut worst = (0.0f64, String::new());
    let mut pass = true;
    for (i, &n) in [32u32, 128].iter().enumerate() {
        for (j, &p_fa) in [0.01f64, 0.025, 0.04, 0.1].iter().enumerate() {
            let seed = 0x0200 + (i * 4 + j) as u64;
            let rate = measure_false_alarm_rate(n, p_fa, EVALS, seed).unwrap();
            let sigma = (p_fa * (1.0 - p_fa) / EVALS as f64).sqrt();
            let pulls = (rate - p_fa).abs() / sigma;
            if pulls > worst.0 {
                worst = (pulls, format!("N={n} p_fa={p_fa}: rate={rate:.4}"));
            }
            pass &= pulls <= 3.0;
        }
    }
    verdict(
        2,
        "false-alarm rate is calibrated",
        pass,
        &format!("worst {:.2} sigma at {}", worst.0, worst.1),
    );
}

/// 03 — Monte Carlo detection rates match the closed-form detection
/// probability within three binomial standard deviations across a sweep of
/// primary-to-noise ratios, and the closed form reduces exactly to the
/// false-alarm target when the primary contributes no power.
#[test]
fn acceptance_03_detection_matches_closed_form() {
    const N: u32 = 32;
    const P_FA: f64 = 0.025;
    const TRIALS: usize = 10_000;

    let gamma = threshold_from_pfa(P_FA, N).unwrap();
    let mut pass = true;
    let mut worst = (0.0f64, String::new());
    for (k, &pnr_db) in [-2.0f64, 0.0, 2.0, 4.0].iter().enumerate() {
        let pnr = 10f64.powf(pnr_db / 10.0);
        let theory = pd_closed_form(gamma, pnr, N).unwrap();
        let mc = measure_detection_rate(N, gamma, 1.0 + pnr, TRIALS, 0x0300 + k as u64).unwrap();
        let sigma = (theory * (1.0 - theory) / TRIALS as f64).sqrt();
        let pulls = (mc - theory).abs() / sigma;
        if pulls > worst.0 {
            worst = (pulls, format!("pnr={pnr_db}dB: mc={mc:.4} vs {theory:.4}"));
        }
        pass &= pulls <= 3.0;
    }

    let at_zero = pd_closed_form(gamma, 0.0, N).unwrap();
    let identity_err = (at_zero - P_FA).abs();
    pass &= identity_err <= 1e-8;

    verdict(
        3,
        "detection matches closed form",
        pass,
        &format!("worst {:.2} sigma at {}; P_D(pnr=0)-P_FA={identity_err:.1e}", worst.0, worst.1),
    );
}

/// 04 — The threshold mapped from a 50% false-alarm target is exactly one:
/// the ratio statistic's median sits at equal window energies.
#[test]
fn acceptance_04_median_threshold_is_one() {
    const TOL: f64 = 1e-9;

    let mut pass = true;
    let mut worst = 0.0f64;
    for n in [4u32, 32, 128] {
        let gamma = threshold_from_pfa(0.5, n).unwrap();
        let err = (gamma - 1.0).abs();
        worst = worst.max(err);
        pass &= err <= TOL;
    }
    verdict(4, "median threshold is one", pass, &format!("max |gamma-1|={worst:.2e} (<= {TOL})"));
}

/// 05 — The closed-form SNR-degradation expressions reproduce their spot
/// values: residual CFO of 9e-3 at 9 dB SNR costs 0.0092 dB, and residual
/// SFO of 5e-6 on carrier 1023 at 9 dB SNR costs 0.003 dB.
#[test]
fn acceptance_05_snr_degradation_spot_values() {
    let snr = 10f64.powf(0.9);

    let d_cfo = snrd_cfo(9e-3, snr).unwrap();
    let cfo_err = (d_cfo - 0.0092).abs();

    let d_sfo = snrd_sfo(5e-6, 1023, snr).unwrap();
    let sfo_err = (d_sfo - 0.003).abs();

    let pass = cfo_err <= 1e-4 && sfo_err <= 2e-4;
    verdict(
        5,
        "offset-induced SNR loss spot values",
        pass,
        &format!("cfo: {d_cfo:.6} dB (err {cfo_err:.1e} <= 1e-4); sfo: {d_sfo:.6} dB (err {sfo_err:.1e} <= 2e-4)"),
    );
}

/// 06 — Offset estimation: (a) a noiseless 320 kHz offset inside a 400 kHz
/// search range is recovered with integer part 20 and total error below
/// 1e-4 carrier spacings; (b) the joint least-squares stage is exact on
/// noiseless synthetic pilot phases; (c) offset MSE curves are monotone
/// non-increasing in SNR at a thousand trials per point.
#[test]
fn acceptance_06_offset_estimators_recover_and_improve() {
    // (a) End-to-end noiseless recovery through the full preamble chain.
    let (mut cfg, _) = reference_config();
    cfg.n_data_symbols = 1;
    let payload = random_payload(&cfg, 3).unwrap();
    let grid = build_frame(&cfg, &payload, 7).unwrap();
    let tx = synthesize(&grid, &cfg).unwrap();
    let rx = apply_cfo(&tx, 320e3).unwrap();
    let est = estimate_sync(&rx, &cfg, 400e3, 7).unwrap();
    let eps_true = 320e3 / cfg.delta_f_hz();
    let recovery_err = (est.eps_total - eps_true).abs();
    let recovery_ok = est.eps_int == 20 && recovery_err < 1e-4;

    // (b) The least-squares stage alone, on phases drawn from its own
    // model: y_j = 2*pi*(symbol_len/n_subcarriers) * (delta * k_j + eps).
    let delta = 1e-4;
    let eps = 0.01;
    let scale = 2.0 * std::f64::consts::PI * cfg.symbol_len() as f64 / cfg.n_subcarriers as f64;
    let carriers: Vec<i64> = (-400..=400).step_by(8).map(|k| k as i64).collect();
    let phases: Vec<f64> =
        carriers.iter().map(|&k| scale * (delta * k as f64 + eps)).collect();
    let (delta_hat, eps_hat) = estimate_cfo_sfo_ls(&phases, &carriers, &cfg).unwrap();
    let ls_err = (delta_hat - delta).abs().max((eps_hat - eps).abs());
    let ls_ok = ls_err < 1e-10;

    // (c) MSE monotone non-increasing over the SNR sweep.
    let mut spec = ExperimentSpec::for_scenario(Scenario::SyncMse);
    assert_eq!(spec.trials, 1_000);
    spec.snr_db = vec![0.0, 3.0, 6.0, 9.0, 12.0];
    let table = run_experiment(&spec).unwrap();
    let mse_eps = column(&table, "mse_eps");
    let mse_delta = column(&table, "mse_delta");
    let monotone =
        |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let mono_ok = monotone(&mse_eps) && monotone(&mse_delta);

    let pass = recovery_ok && ls_ok && mono_ok;
    verdict(
        6,
        "offset estimators recover and improve with SNR",
        pass,
        &format!(
            "eps_int={} err={recovery_err:.1e}; ls err={ls_err:.1e}; mse_eps={mse_eps:?} mse_delta={mse_delta:?}",
            est.eps_int
        ),
    );
}

/// 07 — Under spectral-leakage emulation with CFO and SFO plus receiver
/// window folding, the detection-vs-power curve at the 90% detection level
/// is right-shifted by at most 1 dB relative to the perfectly synchronized
/// curve.
#[test]
fn acceptance_07_impairments_cost_at_most_one_db() {
    const SHIFT_LIMIT_DB: f64 = 1.0;

    let mut spec = ExperimentSpec::for_scenario(Scenario::ImpairmentAblation);
    spec.trials = 300;
    let table = run_experiment(&spec).unwrap();

    let variants = text_column(&table, "variant");
    let sprs = column(&table, "spr_db");
    let p_ds = column(&table, "p_d_emp");
    let curve = |name: &str| -> Vec<(f64, f64)> {
        variants
            .iter()
            .zip(sprs.iter().zip(p_ds.iter()))
            .filter(|(v, _)| v.as_str() == name)
            .map(|(_, (&s, &p))| (s, p))
            .collect()
    };
    // Power ratio where the (decreasing) detection curve crosses 0.9,
    // by linear interpolation on the first bracketing segment.
    let crossing = |c: &[(f64, f64)]| -> Option<f64> {
        c.windows(2).find_map(|w| {
            let ((s0, p0), (s1, p1)) = (w[0], w[1]);
            if p0 >= 0.9 && p1 <= 0.9 && p0 > p1 {
                Some(s0 + (p0 - 0.9) * (s1 - s0) / (p0 - p1))
            } else {
                None
            }
        })
    };

    let perfect = crossing(&curve("perfect_sync"));
    let windowed = crossing(&curve("impaired_windowed"));
    let (pass, detail) = match (perfect, windowed) {
        (Some(p), Some(w)) => {
            let shift = w - p;
            (shift <= SHIFT_LIMIT_DB, format!("90% level: perfect at {p:.2} dB, windowed at {w:.2} dB, shift {shift:+.2} dB (<= {SHIFT_LIMIT_DB})"))
        }
        _ => (false, format!("90% crossing not bracketed (perfect={perfect:?}, windowed={windowed:?})")),
    };
    verdict(7, "synchronization impairments cost at most 1 dB", pass, &detail);
}

/// 08 — Under the exponential power-delay profile, the ensemble channel
/// power matches its analytic value and Monte Carlo detection rates match
/// the fading closed form within three binomial standard deviations.
#[test]
fn acceptance_08_fading_detection_matches_closed_form() {
    const N: u32 = 128;
    const P_FA: f64 = 0.025;
    const TRIALS: usize = 10_000;

    let (frame, _) = reference_config();
    let sigma = draw_channel(&frame, ChannelKind::ExpPdp, 11).unwrap().sigma_h_sq;
    let analytic = 1.0 / (1.0 - (-2.0f64).exp());
    let sigma_err = (sigma - analytic).abs();
    let mut pass = sigma_err < 1e-12;

    let gamma = threshold_from_pfa(P_FA, N).unwrap();
    let mut details = vec![format!("sigma_h_sq err {sigma_err:.1e}")];
    for (k, &pnr_db) in [0.0f64, 4.0].iter().enumerate() {
        let pnr = 10f64.powf(pnr_db / 10.0);
        let theory = pd_closed_form_fading(gamma, pnr, sigma, N).unwrap();
        let mc =
            measure_detection_rate(N, gamma, 1.0 + pnr * sigma, TRIALS, 0x0800 + k as u64).unwrap();
        let sigma_mc = (theory * (1.0 - theory) / TRIALS as f64).sqrt();
        let ok = (mc - theory).abs() <= 3.0 * sigma_mc;
        details.push(format!("pnr={pnr_db}dB: mc={mc:.4} vs {theory:.4}"));
        pass &= ok;
    }
    verdict(8, "fading detection matches closed form", pass, &details.join("; "));
}

/// 09 — Antenna pooling: (a) the pooled two-antenna tone stream fed to a
/// monitor with twice the per-antenna window produces decisions identical
/// to treating it as one stream — and the pooled order is exactly
/// "ascending carrier, antennas innermost"; (b) two pooled antennas detect
/// at least as often as one at every swept power point.
#[test]
fn acceptance_09_antenna_pooling_never_hurts() {
    // (a) Decision-identical pooled stream on a real two-antenna scene.
    let (mut cfg, _) = reference_config();
    cfg.n_data_symbols = 24;
    let payload = random_payload(&cfg, 5).unwrap();
    let grid = build_frame(&cfg, &payload, 7).unwrap();
    let su = synthesize(&grid, &cfg).unwrap();
    let onset_symbol = 12usize;
    let onset = (cfg.n_preambles + onset_symbol) * cfg.symbol_len();
    let pu = generate_primary(&cfg, 10f64.powf(0.5), onset, 9).unwrap();
    let imp = ImpairmentSpec { snr_db: Some(9.0), n_rx: 2, ..ImpairmentSpec::default() };
    let channels = vec![(ChannelProfile::unit(), ChannelProfile::unit()); 2];
    let rx = mix_scene(&su, &pu, &imp, &channels, &cfg, 13).unwrap();
    let (grids, _) = receive_frame(
        &rx,
        &cfg,
        WindowKind::None,
        SyncMode::Perfect { eps_total: 0.0, delta: 0.0 },
        7,
    )
    .unwrap();
    let stream = extract_reserved_tones(&grids, &cfg).unwrap();
    assert_eq!(stream.n_rx, 2);
    assert_eq!(stream.samples.len(), cfg.n_data_symbols * cfg.n_reserved * 2);

    // The documented pooled order, rebuilt by hand from the grids.
    let mut manual = Vec::new();
    for m in 0..cfg.n_data_symbols {
        let sched = schedule_reserved_tones(&cfg, cfg.n_preambles + m).unwrap();
        for idx in sched.shifted_indices(&cfg) {
            for g in &grids {
                manual.push(g.symbols[cfg.n_preambles + m].values[idx]);
            }
        }
    }
    let order_ok = manual == stream.samples;

    let n_per_antenna = 8u32;
    let pooled_n = n_per_antenna * stream.n_rx as u32;
    let (pooled, first_pooled) = stream.monitor(pooled_n, 0.025).unwrap();
    let (direct, first_direct) = run_monitor(&stream.samples, pooled_n, 0.025).unwrap();
    let identical = pooled == direct && first_pooled == first_direct;
    let detected = first_pooled.is_some();

    // (b) Pooled detection rate dominates single-antenna at every point.
    let spec = ExperimentSpec::for_scenario(Scenario::FadingMimo);
    assert_eq!(spec.trials, 10_000);
    assert_eq!(spec.n_rx_arms, vec![1, 2]);
    let table = run_experiment(&spec).unwrap();
    let arms = text_column(&table, "arm");
    let sprs = column(&table, "spr_db");
    let p_ds = column(&table, "p_d_emp");
    let rate = |arm: &str, spr: f64| -> f64 {
        arms.iter()
            .zip(sprs.iter().zip(p_ds.iter()))
            .find(|(a, (&s, _))| a.as_str() == arm && s == spr)
            .map(|(_, (_, &p))| p)
            .unwrap()
    };
    let mut dominated = true;
    let spr_points: Vec<f64> = arms
        .iter()
        .zip(sprs.iter())
        .filter(|(a, _)| a.as_str() == "awgn_1rx")
        .map(|(_, &s)| s)
        .collect();
    for kind in ["awgn", "exp_pdp"] {
        for &s in &spr_points {
            dominated &= rate(&format!("{kind}_2rx"), s) >= rate(&format!("{kind}_1rx"), s);
        }
    }

    let pass = order_ok && identical && detected && dominated;
    verdict(
        9,
        "antenna pooling never hurts",
        pass,
        &format!(
            "pooled order ok={order_ok}, decisions identical={identical}, onset detected={detected}, 2rx >= 1rx at all {} points={dominated}",
            spr_points.len()
        ),
    );
}

/// 10 — The recursive sliding-window energies equal directly summed window
/// energies to within 1e-6 relative error at every step of a 100k-sample
/// random stream.
#[test]
fn acceptance_10_recursive_energies_match_direct_sums() {
    const STREAM: usize = 100_000;
    const REL_TOL: f64 = 1e-6;

    let mut worst = 0.0f64;
    for (n, seed) in [(16u32, 0x0a01u64), (64, 0x0a02)] {
        let mut rng = rng_from_seed(seed);
        let mut det = DetectorState::new(n, 1.5).unwrap();
        det.declare_idle(true);
        let n = n as usize;
        let mut energies: Vec<f64> = Vec::with_capacity(STREAM);
        for _ in 0..STREAM {
            let z = complex_gaussian(&mut rng, 1.0);
            energies.push(z.norm_sqr());
            det.ingest(z).unwrap();
            let seen = energies.len();
            if seen >= 2 * n {
                let direct_u: f64 = energies[seen - n..].iter().sum();
                let direct_v: f64 = energies[seen - 2 * n..seen - n].iter().sum();
                let (v, u) = det.window_energies();
                worst = worst
                    .max((u - direct_u).abs() / direct_u)
                    .max((v - direct_v).abs() / direct_v);
            }
        }
    }
    verdict(
        10,
        "recursive energies match direct sums",
        worst <= REL_TOL,
        &format!("max relative error {worst:.2e} (<= {REL_TOL:.0e}) over {STREAM}-sample streams"),
    );
}

/// 11 — Bit-identical reproducibility: the same spec and seed produce the
/// same CSV bytes, at both the statistic level and the waveform level, and
/// a different seed produces different bytes.
#[test]
fn acceptance_11_same_seed_same_csv() {
    let mut roc = ExperimentSpec::for_scenario(Scenario::Roc);
    roc.trials = 2_000;
    let a = run_experiment(&roc).unwrap().to_csv_string();
    let b = run_experiment(&roc).unwrap().to_csv_string();
    roc.seed = 2;
    let c = run_experiment(&roc).unwrap().to_csv_string();

    let mut mse = ExperimentSpec::for_scenario(Scenario::SyncMse);
    mse.trials = 50;
    mse.snr_db = vec![9.0];
    let d = run_experiment(&mse).unwrap().to_csv_string();
    let e = run_experiment(&mse).unwrap().to_csv_string();

    let pass = a == b && a != c && d == e;
    verdict(
        11,
        "same seed reproduces the CSV byte for byte",
        pass,
        &format!("roc repeat identical={}, reseeded differs={}, waveform repeat identical={}", a == b, a != c, d == e),
    );
}
