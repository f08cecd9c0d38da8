//! `specmon` — command-line driver for the reserved-tone monitoring
//! experiments.
//!
//! Each subcommand runs one experiment family from `specmon-core`'s harness
//! with sensible desk-scale defaults, optionally adjusted by a JSON config
//! file and by `--seed` / `--trials` flags, and writes the aggregated
//! results as CSV. Runs are deterministic in the final spec, so a stored
//! config plus a seed reproduces a CSV byte for byte.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use specmon_core::harness::{emit_csv, run_experiment, ExperimentSpec, Scenario};

const CONFIG_HELP: &str = "\
CONFIG FILES:
  --config takes a JSON object that is merged over the subcommand's default
  experiment spec: objects merge recursively, everything else (numbers,
  strings, arrays, null) replaces the default. Keys must name spec fields;
  unknown keys are rejected. Arrays replace wholesale, so to sweep your own
  grid give the complete list, e.g. {\"spr_db\": [2.0, 4.0, 6.0]}.
  `--seed` and `--trials` are applied after the config and win.

  The config may also switch the \"scenario\" field to any family sharing
  the same spec layout; `pdf-check` uses this to reach the conditional
  densities (see its help).

  Run `specmon <subcommand> --help` for that scenario's CSV schema.";

const ROC_SCHEMA: &str = "\
OUTPUT COLUMNS:
  spr_db,pnr_db,gamma,p_fa_target,p_fa_emp,p_d_emp,p_d_theory,ci_halfwidth,trials
  One row per false-alarm target (the `p_fa` list) at the first `spr_db`
  entry. `p_fa_emp` is measured on non-overlapping streaming evaluations;
  `p_d_emp` is the snapshot detection rate at PNR = SNR - SPR;
  `p_d_theory` is the closed form; `ci_halfwidth` is the 95% binomial
  half-width of `p_d_emp`.";

const PDF_SCHEMA: &str = "\
OUTPUT COLUMNS:
  x_lo,x_hi,pdf_emp,pdf_theory,ks_stat,window_n,ratio_db,trials
  One row per histogram bin over [0, the statistic's 99.9th percentile);
  `ks_stat` (repeated on every row) is the exact Kolmogorov-Smirnov distance
  between the raw draws and the closed-form law.

  With a config containing {\"scenario\": \"cond_pdf\"} this subcommand
  instead sweeps the `pnr_db` list and emits
  pnr_db,x_lo,x_hi,pdf_emp,pdf_theory,ks_stat,window_n,trials
  with one histogram grid per primary strength.";

const PD_SWEEP_SCHEMA: &str = "\
OUTPUT COLUMNS:
  spr_db,pnr_db,gamma,p_fa_target,p_fa_emp,p_d_emp,p_d_theory,ci_halfwidth,trials
  One row per `spr_db` entry at the first `p_fa` entry. Set
  \"force_pu_absent\": true to verify that the detection column collapses
  onto the false-alarm target.";

const SYNC_MSE_SCHEMA: &str = "\
OUTPUT COLUMNS:
  snr_db,trials,mse_eps,rmse_eps,bias_eps,mse_delta,rmse_delta,bias_delta
  One row per `snr_db` entry. `eps` columns are normalized-CFO error in
  carrier spacings, measured against the offset as seen on the receiver's
  sampling clock; `delta` columns are normalized-SFO error (1e-4 = 100 ppm).";

const ABLATION_SCHEMA: &str = "\
OUTPUT COLUMNS:
  variant,spr_db,pnr_db,gamma,p_fa_target,p_d_emp,p_d_theory,ci_halfwidth,trials
  One row per variant x `spr_db` point, variants in order: perfect_sync
  (genie-synchronized reference), impaired_plain (CFO/SFO applied and
  estimated, plain demodulation), impaired_windowed (same plus the tapered
  fold-back window). Waveform-level: each trial synthesizes, impairs, and
  demodulates a full frame at 4x oversampling, so keep `trials` modest.";

const FADING_SCHEMA: &str = "\
OUTPUT COLUMNS:
  arm,n_rx,window_n,sigma_h_sq,spr_db,pnr_db,gamma,p_fa_target,p_d_emp,p_d_theory,ci_halfwidth,trials
  One row per antenna arm x channel kind x `spr_db` point. Arms are named
  `awgn_<n>rx` / `exp_pdp_<n>rx` for every entry of `n_rx_arms`; pooling
  antennas multiplies the effective window (`window_n` column shows the
  pooled value). Fading uses the channel's ensemble-average power gain.";

const LATENCY_SCHEMA: &str = "\
OUTPUT COLUMNS:
  spr_db,pnr_db,window_n,p_fa_target,trials,detect_rate,fa_frame_rate,\
mean_latency_tones,p90_latency_tones,mean_latency_symbols,mean_latency_us,p90_latency_us
  One row per `spr_db` entry. Latency counts reserved-tone samples from
  primary onset to the first detection (inclusive) and is also converted to
  OFDM symbols and microseconds; latency cells are NaN when nothing was
  detected. `fa_frame_rate` is the fraction of trials with any detection
  before the onset.";

#[derive(Parser)]
#[command(
    name = "specmon",
    version,
    about = "Monte Carlo experiments for reserved-tone spectrum monitoring",
    after_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config merged over the scenario defaults (see `specmon --help`)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base RNG seed (overrides the config)
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep point (overrides the config)
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Output CSV path
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Operating characteristic: measured false-alarm and detection rates
    /// across false-alarm targets, with closed-form companions
    #[command(after_help = ROC_SCHEMA)]
    Roc(RunArgs),
    /// Decision-statistic density vs the closed-form law (switchable to the
    /// conditional densities via config)
    #[command(after_help = PDF_SCHEMA)]
    PdfCheck(RunArgs),
    /// Detection probability against the secondary-to-primary power ratio
    #[command(after_help = PD_SWEEP_SCHEMA)]
    PdSweep(RunArgs),
    /// CFO/SFO estimation error vs SNR through the full receiver chain
    #[command(after_help = SYNC_MSE_SCHEMA)]
    SyncMse(RunArgs),
    /// Detection curves with impairments and compensation on, against the
    /// genie-synchronized reference
    #[command(after_help = ABLATION_SCHEMA)]
    Ablation(RunArgs),
    /// Fading and multi-antenna detection curves
    #[command(after_help = FADING_SCHEMA)]
    Fading(RunArgs),
    /// Time from primary reappearance to detection
    #[command(after_help = LATENCY_SCHEMA)]
    Latency(RunArgs),
}

impl Command {
    fn scenario(&self) -> Scenario {
        match self {
            Command::Roc(_) => Scenario::Roc,
            Command::PdfCheck(_) => Scenario::PdfCheck,
            Command::PdSweep(_) => Scenario::PdVsSpr,
            Command::SyncMse(_) => Scenario::SyncMse,
            Command::Ablation(_) => Scenario::ImpairmentAblation,
            Command::Fading(_) => Scenario::FadingMimo,
            Command::Latency(_) => Scenario::Latency,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Roc(a)
            | Command::PdfCheck(a)
            | Command::PdSweep(a)
            | Command::SyncMse(a)
            | Command::Ablation(a)
            | Command::Fading(a)
            | Command::Latency(a) => a,
        }
    }
}

/// Merges `user` into `base`. Objects merge key-wise; any other value
/// replaces the default. Keys that do not exist in the default spec are
/// rejected with their path, so config typos fail loudly instead of being
/// silently ignored.
fn merge_config(base: &mut Value, user: Value, path: &str) -> Result<()> {
    match (base, user) {
        (Value::Object(b), Value::Object(u)) => {
            for (key, value) in u {
                let child_path = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                match b.get_mut(&key) {
                    Some(slot) => merge_config(slot, value, &child_path)?,
                    None => anyhow::bail!("config key `{child_path}` does not name a spec field"),
                }
            }
            Ok(())
        }
        (slot, value) => {
            *slot = value;
            Ok(())
        }
    }
}

/// Builds the final spec: scenario defaults, then the config file, then the
/// seed/trials flags.
fn load_spec(scenario: Scenario, args: &RunArgs) -> Result<ExperimentSpec> {
    let mut merged = serde_json::to_value(ExperimentSpec::for_scenario(scenario))
        .context("serializing the default spec")?;
    if let Some(config_path) = &args.config {
        let text = std::fs::read_to_string(config_path)
            .with_context(|| format!("reading config {}", config_path.display()))?;
        let user: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", config_path.display()))?;
        ensure!(
            user.is_object(),
            "config {} must hold a JSON object",
            config_path.display()
        );
        merge_config(&mut merged, user, "")?;
    }
    let mut spec: ExperimentSpec =
        serde_json::from_value(merged).context("config does not form a valid experiment spec")?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    Ok(spec)
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let args = cli.command.args();
    let spec = load_spec(cli.command.scenario(), args)?;
    let table = run_experiment(&spec)?;
    emit_csv(&table, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "{:?}: {} rows x {} trials -> {}",
        spec.scenario,
        table.rows().len(),
        spec.trials,
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One-line diagnostic: the whole context chain, colon-separated.
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
