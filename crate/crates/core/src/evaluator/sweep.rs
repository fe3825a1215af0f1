//! Monte-Carlo throughput sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcfg::{generate_channels, NetworkConfig};
use crate::profile::FedCSI;
use crate::quantizer::{allocate_bits, quantize, QuantizerOptions};
use crate::seeding::trial_seed;
use crate::solver::{solve_full, SolverOptions};

use super::rate::sum_rate;
use super::schemes::PreparedScheme;

/// Quantity varied across sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Transmit SNR in dB.
    SnrDb,
    /// Total feedback bits per channel draw.
    TotalBits,
}

/// What to sweep and how many trials to run at each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Swept quantity.
    pub variable: SweepVariable,
    /// Its values.
    pub values: Vec<f64>,
    /// SNR when sweeping bits.
    #[serde(default)]
    pub snr_db: Option<f64>,
    /// Bits when sweeping SNR; absent means unquantized feedback.
    #[serde(default)]
    pub total_bits: Option<u32>,
    /// Channel draws per point.
    pub trials: usize,
    /// Solver settings; the seed is replaced by each trial's seed.
    #[serde(default)]
    pub solver: SolverOptions,
    /// Quantizer settings.
    #[serde(default)]
    pub quantizer: QuantizerOptions,
}

impl SweepSpec {
    /// Checks that every point is well defined.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("sweep needs at least one trial".into()));
        }
        if self.values.is_empty() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep values must be a non-empty list of finite numbers".into()));
        }
        match self.variable {
            SweepVariable::SnrDb => {}
            SweepVariable::TotalBits => {
                if self.snr_db.is_none_or(|s| !s.is_finite()) {
                    return Err(Error::Config("a bits sweep needs a finite snr_db".into()));
                }
                if self.values.iter().any(|&v| v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64) {
                    return Err(Error::Config("bit counts must be non-negative integers".into()));
                }
            }
        }
        Ok(())
    }
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Value of the swept quantity.
    pub value: f64,
    /// Mean sum rate over successful trials, bits/s/Hz (NaN if none succeeded).
    pub mean_tput: f64,
    /// Half-width of the normal-approximation 95% confidence interval (0 with fewer than two trials).
    pub ci95: f64,
    /// Successful trials.
    pub trials: usize,
    /// Trials whose feedback, quantization or solve failed.
    pub failures: usize,
    /// Successful trials whose solver did not reach its leakage tolerance.
    pub unconverged: usize,
}

/// Sweep outcome for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    /// Scheme name.
    pub scheme: String,
    /// Feedback dimension per channel draw.
    pub feedback_dimension: usize,
    /// Swept quantity.
    pub sweep_var: SweepVariable,
    /// One entry per sweep value.
    pub points: Vec<SweepPoint>,
    /// Run seed.
    pub seed: u64,
}

/// Per-point outcome of one trial: `Some((rate, converged))` or `None` on failure.
type TrialOutcome = Vec<Option<(f64, bool)>>;

fn quantized(fed: &FedCSI, bits: Option<u32>, seed: u64, opts: &QuantizerOptions) -> Result<FedCSI> {
    match bits {
        None => Ok(fed.clone()),
        Some(total) => Ok(quantize(fed, &allocate_bits(&fed.subspace_dims(), total)?, seed, opts)?.fed),
    }
}

fn run_trial(cfg: &NetworkConfig, scheme: &PreparedScheme, spec: &SweepSpec, seed: u64, t: u64) -> TrialOutcome {
    let ts = trial_seed(seed, t);
    let n = spec.values.len();
    let h = generate_channels(cfg, ts);
    let Ok(fed) = scheme.feedback(cfg, &h) else {
        return vec![None; n];
    };
    let opts = SolverOptions { seed: ts, ..spec.solver };
    let point = |bits: Option<u32>, snrs: &[f64]| -> Result<Vec<(f64, bool)>> {
        let fed = quantized(&fed, bits, ts, &spec.quantizer)?;
        let sol = solve_full(cfg, &scheme.profile, &h, &fed, &opts)?;
        snrs.iter().map(|&s| Ok((sum_rate(cfg, &h, &sol.v, &sol.u, s)?, sol.converged))).collect()
    };
    match spec.variable {
        SweepVariable::SnrDb => match point(spec.total_bits, &spec.values) {
            Ok(rates) => rates.into_iter().map(Some).collect(),
            Err(_) => vec![None; n],
        },
        SweepVariable::TotalBits => {
            let snr = spec.snr_db.unwrap_or_default();
            spec.values.iter().map(|&b| point(Some(b as u32), &[snr]).ok().map(|r| r[0])).collect()
        }
    }
}

/// Mean and 95% confidence half-width `1.96 s / sqrt(n)` of `xs`.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `spec.trials` channel draws for every scheme.
///
/// Trial `t` uses seed `trial_seed(seed, t)` for channels, codebooks and
/// solver initialization, and the same draws are shared by all schemes and
/// sweep points. Trials run on `workers` threads (all cores when `None`);
/// results are reduced in trial order, so they do not depend on scheduling.
pub fn run_sweep(
    cfg: &NetworkConfig,
    schemes: &[PreparedScheme],
    spec: &SweepSpec,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ExperimentResult>> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidState(format!("cannot start worker pool: {e}")))?;
    let mut results = Vec::with_capacity(schemes.len());
    for scheme in schemes {
        let outcomes: Vec<TrialOutcome> = pool.install(|| {
            (0..spec.trials as u64).into_par_iter().map(|t| run_trial(cfg, scheme, spec, seed, t)).collect()
        });
        let points = spec
            .values
            .iter()
            .enumerate()
            .map(|(p, &value)| {
                let ok: Vec<(f64, bool)> = outcomes.iter().filter_map(|o| o[p]).collect();
                let rates: Vec<f64> = ok.iter().map(|r| r.0).collect();
                let (mean_tput, ci95) = mean_ci95(&rates);
                SweepPoint {
                    value,
                    mean_tput,
                    ci95,
                    trials: ok.len(),
                    failures: spec.trials - ok.len(),
                    unconverged: ok.iter().filter(|r| !r.1).count(),
                }
            })
            .collect();
        results.push(ExperimentResult {
            scheme: scheme.name.clone(),
            feedback_dimension: scheme.feedback_dimension,
            sweep_var: spec.variable,
            points,
            seed,
        });
    }
    Ok(results)
}

/// Writes one CSV row per scheme and sweep point with columns
/// `scheme,sweep_var,mean_tput,ci95,trials,feedback_dim,seed`.
pub fn write_results_csv<W: Write>(results: &[ExperimentResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "sweep_var", "mean_tput", "ci95", "trials", "feedback_dim", "seed"])?;
    for r in results {
        for p in &r.points {
            w.write_record([
                r.scheme.clone(),
                p.value.to_string(),
                p.mean_tput.to_string(),
                p.ci95.to_string(),
                p.trials.to_string(),
                r.feedback_dimension.to_string(),
                r.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
