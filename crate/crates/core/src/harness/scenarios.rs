//! Scenario runners: one function per experiment family. Each sweeps its
//! axes in a fixed order, runs trials in parallel with per-trial derived
//! seeds, and aggregates into a [`Table`] whose column set is part of the
//! output contract — downstream plots key on the header names.

use rayon::prelude::*;

use crate::channel::{draw_channel, ChannelKind, ImpairmentSpec};
use crate::detector::{cdf_x, pd_closed_form, pd_closed_form_fading, pdf_x, threshold_from_pfa};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, rng_from_seed};
use crate::phy_tx::{build_frame, generate_primary, random_payload, synthesize};
use crate::table::{fmt_sig9, Table};

use super::model::{
    latency_trial, measure_detection_rate, measure_false_alarm_rate, ratio_snapshot,
};
use super::phy::{ablation_trial, sync_mse_trial, ABLATION_VARIANTS};
use super::stats::{binomial_halfwidth, histogram, percentile};
use super::{ExperimentSpec, Scenario, TrialReport};

/// Runs `trials` fallible jobs in parallel, keeping trial order in the
/// output so aggregation is schedule-independent.
fn par_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Draws `trials` snapshots of the decision statistic at window-power ratio
/// `rho` and returns them sorted ascending.
fn sorted_statistic_draws(
    spec: &ExperimentSpec,
    n: u32,
    rho: f64,
    point_idx: u64,
) -> Result<Vec<f64>> {
    let tag = spec.scenario.tag();
    let mut draws = par_trials(spec.trials, |t| {
        let mut rng = rng_from_seed(derive_seed(spec.seed, &[tag, point_idx, t as u64]));
        Ok(ratio_snapshot(&mut rng, n, rho))
    })?;
    draws.sort_by(f64::total_cmp);
    Ok(draws)
}

/// Appends histogram rows for one batch of sorted draws. The grid spans
/// `[0, hi)`; out-of-range draws land in the edge bins (visible as a small
/// excess over the theory curve in the last bin), while the KS statistic is
/// computed from the raw draws and is exact.
fn push_density_rows(
    table: &mut Table,
    prefix: &[String],
    suffix: &[String],
    draws: &[f64],
    n: u32,
    rho: f64,
    hi: f64,
    bins: usize,
) -> Result<()> {
    let counts = histogram(draws, 0.0, hi, bins)?;
    let width = hi / bins as f64;
    let norm = 1.0 / (draws.len() as f64 * width);
    for (b, &count) in counts.iter().enumerate() {
        let x_lo = b as f64 * width;
        let x_hi = x_lo + width;
        let center = x_lo + 0.5 * width;
        let mut row = prefix.to_vec();
        row.extend([
            fmt_sig9(x_lo),
            fmt_sig9(x_hi),
            fmt_sig9(count as f64 * norm),
            fmt_sig9(pdf_x(center, n, rho)?),
        ]);
        row.extend_from_slice(suffix);
        table.push_row(row)?;
    }
    Ok(())
}

/// Kolmogorov–Smirnov distance between the sorted draws and the statistic's
/// closed-form law at ratio `rho`.
fn ks_against_theory(draws: &[f64], n: u32, rho: f64) -> Result<f64> {
    super::stats::ks_statistic(draws, |x| cdf_x(x, n, rho).unwrap_or(f64::NAN))
}

/// Upper histogram edge: the statistic's 99.9th percentile at ratio `rho`
/// (the threshold maps false-alarm mass to quantiles, and scaling the
/// newer window scales the statistic linearly).
fn density_grid_hi(n: u32, rho: f64) -> Result<f64> {
    Ok(rho * threshold_from_pfa(1e-3, n)?)
}

pub(super) fn run_pdf_check(spec: &ExperimentSpec) -> Result<Table> {
    let n = spec.window_n[0];
    let rho = 10f64.powf(spec.ratio_db / 10.0);
    let draws = sorted_statistic_draws(spec, n, rho, 0)?;
    let ks = ks_against_theory(&draws, n, rho)?;
    let hi = density_grid_hi(n, rho)?;

    let mut table = Table::new(&[
        "x_lo",
        "x_hi",
        "pdf_emp",
        "pdf_theory",
        "ks_stat",
        "window_n",
        "ratio_db",
        "trials",
    ]);
    let suffix = [
        fmt_sig9(ks),
        n.to_string(),
        fmt_sig9(spec.ratio_db),
        spec.trials.to_string(),
    ];
    push_density_rows(&mut table, &[], &suffix, &draws, n, rho, hi, spec.histogram_bins)?;
    Ok(table)
}

pub(super) fn run_cond_pdf(spec: &ExperimentSpec) -> Result<Table> {
    let n = spec.window_n[0];
    let mut table = Table::new(&[
        "pnr_db",
        "x_lo",
        "x_hi",
        "pdf_emp",
        "pdf_theory",
        "ks_stat",
        "window_n",
        "trials",
    ]);
    for (i, &pnr_db) in spec.pnr_db.iter().enumerate() {
        // Under an active primary the newer window carries noise plus
        // primary energy, so its power exceeds the older window's by
        // 1 + PNR.
        let rho = 1.0 + 10f64.powf(pnr_db / 10.0);
        let draws = sorted_statistic_draws(spec, n, rho, i as u64)?;
        let ks = ks_against_theory(&draws, n, rho)?;
        let hi = density_grid_hi(n, rho)?;
        let prefix = [fmt_sig9(pnr_db)];
        let suffix = [fmt_sig9(ks), n.to_string(), spec.trials.to_string()];
        push_density_rows(&mut table, &prefix, &suffix, &draws, n, rho, hi, spec.histogram_bins)?;
    }
    Ok(table)
}

/// Shared detection-curve engine: for each `(spr_db, p_fa)` operating point,
/// measure the streaming false-alarm rate on non-overlapping evaluations and
/// the snapshot detection rate at PNR = SNR − SPR, next to their closed
/// forms.
fn detection_table(spec: &ExperimentSpec, points: &[(f64, f64)]) -> Result<Table> {
    let n = spec.window_n[0];
    let snr_db = spec.snr_db_required()?;
    let tag = spec.scenario.tag();
    let mut table = Table::new(&[
        "spr_db",
        "pnr_db",
        "gamma",
        "p_fa_target",
        "p_fa_emp",
        "p_d_emp",
        "p_d_theory",
        "ci_halfwidth",
        "trials",
    ]);
    for (i, &(spr_db, p_fa)) in points.iter().enumerate() {
        let gamma = threshold_from_pfa(p_fa, n)?;
        let pnr_db = snr_db - spr_db;
        let pnr = if spec.force_pu_absent {
            0.0
        } else {
            10f64.powf(pnr_db / 10.0)
        };
        let p_fa_emp =
            measure_false_alarm_rate(n, p_fa, spec.trials, derive_seed(spec.seed, &[tag, i as u64, 0]))?;
        let p_d_emp = measure_detection_rate(
            n,
            gamma,
            1.0 + pnr,
            spec.trials,
            derive_seed(spec.seed, &[tag, i as u64, 1]),
        )?;
        let p_d_theory = pd_closed_form(gamma, pnr, n)?;
        table.push_row(vec![
            fmt_sig9(spr_db),
            fmt_sig9(pnr_db),
            fmt_sig9(gamma),
            fmt_sig9(p_fa),
            fmt_sig9(p_fa_emp),
            fmt_sig9(p_d_emp),
            fmt_sig9(p_d_theory),
            fmt_sig9(binomial_halfwidth(p_d_emp, spec.trials)),
            spec.trials.to_string(),
        ])?;
    }
    Ok(table)
}

pub(super) fn run_roc(spec: &ExperimentSpec) -> Result<Table> {
    let spr_db = spec.spr_db[0];
    let points: Vec<(f64, f64)> = spec.p_fa.iter().map(|&p| (spr_db, p)).collect();
    detection_table(spec, &points)
}

pub(super) fn run_pd_vs_spr(spec: &ExperimentSpec) -> Result<Table> {
    let p_fa = spec.p_fa[0];
    let points: Vec<(f64, f64)> = spec.spr_db.iter().map(|&s| (s, p_fa)).collect();
    detection_table(spec, &points)
}

pub(super) fn run_sync_mse(spec: &ExperimentSpec) -> Result<Table> {
    let cfg = &spec.frame;
    let tag = spec.scenario.tag();
    // One clean frame serves every trial; the noise, drawn per trial, is
    // what distinguishes them.
    let payload = random_payload(cfg, derive_seed(spec.seed, &[tag, 0]))?;
    let grid = build_frame(cfg, &payload, spec.seed)?;
    let tx = synthesize(&grid, cfg)?;
    let silence = generate_primary(cfg, 0.0, 0, 0)?;

    let mut table = Table::new(&[
        "snr_db",
        "trials",
        "mse_eps",
        "rmse_eps",
        "bias_eps",
        "mse_delta",
        "rmse_delta",
        "bias_delta",
    ]);
    for (i, &snr_db) in spec.snr_db.iter().enumerate() {
        let imp = ImpairmentSpec {
            snr_db: Some(snr_db),
            ..spec.impairments.clone()
        };
        let errs = par_trials(spec.trials, |t| {
            sync_mse_trial(
                &tx,
                &silence,
                cfg,
                &imp,
                spec.seed,
                derive_seed(spec.seed, &[tag, i as u64, t as u64]),
            )
        })?;
        let k = errs.len() as f64;
        let (mut mse_e, mut bias_e, mut mse_d, mut bias_d) = (0.0, 0.0, 0.0, 0.0);
        for &(de, dd) in &errs {
            mse_e += de * de / k;
            bias_e += de / k;
            mse_d += dd * dd / k;
            bias_d += dd / k;
        }
        table.push_row(vec![
            fmt_sig9(snr_db),
            spec.trials.to_string(),
            fmt_sig9(mse_e),
            fmt_sig9(mse_e.sqrt()),
            fmt_sig9(bias_e),
            fmt_sig9(mse_d),
            fmt_sig9(mse_d.sqrt()),
            fmt_sig9(bias_d),
        ])?;
    }
    Ok(table)
}

pub(super) fn run_ablation(spec: &ExperimentSpec) -> Result<Table> {
    let n = spec.window_n[0];
    let p_fa = spec.p_fa[0];
    let snr_db = spec.snr_db_required()?;
    let gamma = threshold_from_pfa(p_fa, n)?;
    let tag = spec.scenario.tag();
    // Mid-frame onset: enough clean tones before it to calibrate, enough
    // after it to fill the newer window (checked per trial).
    let onset_data_symbol = spec.frame.n_data_symbols / 2;

    let mut table = Table::new(&[
        "variant",
        "spr_db",
        "pnr_db",
        "gamma",
        "p_fa_target",
        "p_d_emp",
        "p_d_theory",
        "ci_halfwidth",
        "trials",
    ]);
    for (v, variant) in ABLATION_VARIANTS.iter().enumerate() {
        for (i, &spr_db) in spec.spr_db.iter().enumerate() {
            let hits = par_trials(spec.trials, |t| {
                ablation_trial(
                    &spec.frame,
                    &spec.impairments,
                    variant,
                    spr_db,
                    n,
                    p_fa,
                    onset_data_symbol,
                    spec.seed,
                    derive_seed(spec.seed, &[tag, v as u64, i as u64, t as u64]),
                )
            })?;
            let p_d_emp =
                hits.iter().filter(|&&h| h).count() as f64 / spec.trials as f64;
            let pnr_db = snr_db - spr_db;
            let p_d_theory = pd_closed_form(gamma, 10f64.powf(pnr_db / 10.0), n)?;
            table.push_row(vec![
                variant.name.to_string(),
                fmt_sig9(spr_db),
                fmt_sig9(pnr_db),
                fmt_sig9(gamma),
                fmt_sig9(p_fa),
                fmt_sig9(p_d_emp),
                fmt_sig9(p_d_theory),
                fmt_sig9(binomial_halfwidth(p_d_emp, spec.trials)),
                spec.trials.to_string(),
            ])?;
        }
    }
    Ok(table)
}

pub(super) fn run_fading_mimo(spec: &ExperimentSpec) -> Result<Table> {
    let n_base = spec.window_n[0];
    let p_fa = spec.p_fa[0];
    let snr_db = spec.snr_db_required()?;
    let tag = spec.scenario.tag();
    // The profile's expected power gain is a property of the model, not of
    // any tap realization, so any seed reports the same value.
    let sigma_exp = draw_channel(&spec.frame, ChannelKind::ExpPdp, 0)?.sigma_h_sq;

    let mut table = Table::new(&[
        "arm",
        "n_rx",
        "window_n",
        "sigma_h_sq",
        "spr_db",
        "pnr_db",
        "gamma",
        "p_fa_target",
        "p_d_emp",
        "p_d_theory",
        "ci_halfwidth",
        "trials",
    ]);
    let mut arm_idx = 0u64;
    for &n_rx in &spec.n_rx_arms {
        for (kind, sigma_h_sq) in [("awgn", 1.0), ("exp_pdp", sigma_exp)] {
            // Antennas share the schedule, so pooling multiplies the
            // samples available per decision window.
            let window = n_base
                .checked_mul(n_rx as u32)
                .ok_or_else(|| Error::config("pooled window length overflows u32"))?;
            let gamma = threshold_from_pfa(p_fa, window)?;
            for (i, &spr_db) in spec.spr_db.iter().enumerate() {
                let pnr_db = snr_db - spr_db;
                let pnr = if spec.force_pu_absent {
                    0.0
                } else {
                    10f64.powf(pnr_db / 10.0)
                };
                // Received reserved-tone power under fading averages over
                // the channel ensemble: noise plus sigma_h_sq-scaled
                // primary energy.
                let p_d_emp = measure_detection_rate(
                    window,
                    gamma,
                    1.0 + pnr * sigma_h_sq,
                    spec.trials,
                    derive_seed(spec.seed, &[tag, arm_idx, i as u64]),
                )?;
                let p_d_theory = pd_closed_form_fading(gamma, pnr, sigma_h_sq, window)?;
                table.push_row(vec![
                    format!("{kind}_{n_rx}rx"),
                    n_rx.to_string(),
                    window.to_string(),
                    fmt_sig9(sigma_h_sq),
                    fmt_sig9(spr_db),
                    fmt_sig9(pnr_db),
                    fmt_sig9(gamma),
                    fmt_sig9(p_fa),
                    fmt_sig9(p_d_emp),
                    fmt_sig9(p_d_theory),
                    fmt_sig9(binomial_halfwidth(p_d_emp, spec.trials)),
                    spec.trials.to_string(),
                ])?;
            }
            arm_idx += 1;
        }
    }
    Ok(table)
}

pub(super) fn run_latency(spec: &ExperimentSpec) -> Result<Table> {
    let n = spec.window_n[0];
    let p_fa = spec.p_fa[0];
    let snr_db = spec.snr_db_required()?;
    let tag = spec.scenario.tag();
    let n_rx = spec.impairments.n_rx;
    let tones_per_symbol = spec.frame.n_reserved * n_rx;
    let stream_len = spec.frame.n_data_symbols * tones_per_symbol;
    let onset = spec
        .onset_tone
        .unwrap_or((spec.frame.n_data_symbols / 2) * tones_per_symbol);
    if onset < 2 * n as usize {
        return Err(Error::config(format!(
            "window {n} needs {} primary-free reserved tones to calibrate, \
             but the primary arrives at tone {onset}",
            2 * n
        )));
    }
    if stream_len < onset + n as usize {
        return Err(Error::config(format!(
            "window {n} needs {} reserved tones but the frame only yields {stream_len}",
            onset + n as usize
        )));
    }

    let mut table = Table::new(&[
        "spr_db",
        "pnr_db",
        "window_n",
        "p_fa_target",
        "trials",
        "detect_rate",
        "fa_frame_rate",
        "mean_latency_tones",
        "p90_latency_tones",
        "mean_latency_symbols",
        "mean_latency_us",
        "p90_latency_us",
    ]);
    for (i, &spr_db) in spec.spr_db.iter().enumerate() {
        let pnr_db = snr_db - spr_db;
        let pnr = if spec.force_pu_absent {
            0.0
        } else {
            10f64.powf(pnr_db / 10.0)
        };
        let reports = par_trials(spec.trials, |t| {
            let trial_seed = derive_seed(spec.seed, &[tag, i as u64, t as u64]);
            let outcome = latency_trial(n, p_fa, stream_len, onset, 1.0 + pnr, trial_seed)?;
            let report = TrialReport {
                seed: trial_seed,
                scenario: Scenario::Latency,
                swept: vec![("spr_db".to_string(), spr_db)],
                pu_present: !spec.force_pu_absent,
                detected: outcome.latency_tones.is_some(),
                latency_tones: outcome.latency_tones,
                latency_symbols: outcome
                    .latency_tones
                    .map(|l| l as f64 / tones_per_symbol as f64),
                sync: None,
            };
            Ok((report, outcome.pre_onset_false_alarm))
        })?;

        let detections = reports.iter().filter(|(r, _)| r.detected).count();
        let false_alarm_frames = reports.iter().filter(|&&(_, fa)| fa).count();
        let mut latencies: Vec<f64> = reports
            .iter()
            .filter_map(|(r, _)| r.latency_tones.map(|l| l as f64))
            .collect();
        latencies.sort_by(f64::total_cmp);
        let (mean_tones, p90_tones) = if latencies.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let mean = latencies.iter().sum::<f64>() / latencies.len() as f64;
            (mean, percentile(&latencies, 0.9)?)
        };
        let tone_duration_s = spec.frame.symbol_duration_s() / tones_per_symbol as f64;
        table.push_row(vec![
            fmt_sig9(spr_db),
            fmt_sig9(pnr_db),
            n.to_string(),
            fmt_sig9(p_fa),
            spec.trials.to_string(),
            fmt_sig9(detections as f64 / spec.trials as f64),
            fmt_sig9(false_alarm_frames as f64 / spec.trials as f64),
            fmt_sig9(mean_tones),
            fmt_sig9(p90_tones),
            fmt_sig9(mean_tones / tones_per_symbol as f64),
            fmt_sig9(mean_tones * tone_duration_s * 1e6),
            fmt_sig9(p90_tones * tone_duration_s * 1e6),
        ])?;
    }
    Ok(table)
}
