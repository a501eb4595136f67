//! Early-stop parameter estimation.
//!
//! Treating each AUC check as a Bernoulli trial whose success is "the
//! training AUC improved", the number of checks between successive
//! improvements is modeled as geometric. A probe run with check
//! interval 1 and halting disabled produces the waiting-time sample;
//! from it come the maximum-likelihood estimate p̂ = n/Σkᵢ, a
//! bias-corrected value p̂ − p̂/(1−p̂), the sample-size-adjusted variance
//! (1/(n−1))·(1−p̂)/p̂², and a normal-approximation confidence interval.
//! Integer check intervals inside the interval are then scored by short
//! halting-enabled training runs and the best becomes the stop
//! parameter X.
//!
//! The printed bias correction subtracts an odds ratio from a
//! probability and is negative for any p̂ < 1; it is kept verbatim as
//! [`CiMode::Verbatim`] (the default), while [`CiMode::Standard`]
//! centers the interval on the mean waiting time 1/p̂ with the same
//! spread. Either way the interval only generates integer candidates,
//! clamped to [1, T].

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linear::{train_linear, LinearConfig};
use crate::metrics::auc_ranked;
use crate::rng::{derive_seed, salt};
use crate::trace::{HaltRule, TrainingTrace};

/// Two-sided 95% normal quantile used by the interval.
pub const Z_95: f64 = 1.96;

/// Waiting-time sample k₁..kₙ (checks between successive improvements).
#[derive(Debug, Clone)]
pub struct WaitingTimes {
    k: Vec<u64>,
}

impl WaitingTimes {
    /// Validates a non-empty sample with every kᵢ ≥ 1.
    pub fn new(k: Vec<u64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::NoImprovements);
        }
        if k.contains(&0) {
            return Err(Error::InvalidParameter(
                "waiting times must be >= 1".into(),
            ));
        }
        Ok(WaitingTimes { k })
    }

    pub fn samples(&self) -> &[u64] {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn sum(&self) -> u64 {
        self.k.iter().sum()
    }
}

/// Extract waiting times from a training trace: kᵢ counts the checks
/// from the previous improvement (or the start) up to and including the
/// i-th improvement. Checks after the last improvement are discarded.
pub fn collect_waiting_times(trace: &TrainingTrace) -> Result<WaitingTimes> {
    if trace.improvements.is_empty() {
        return Err(Error::NoImprovements);
    }
    let mut k = Vec::with_capacity(trace.improvements.len());
    let mut previous = 0u64;
    for &ordinal in &trace.improvements {
        k.push(ordinal as u64 - previous);
        previous = ordinal as u64;
    }
    WaitingTimes::new(k)
}

/// Maximum-likelihood estimate p̂ = n / Σ kᵢ, in (0, 1].
pub fn mle_p(times: &WaitingTimes) -> f64 {
    times.n() as f64 / times.sum() as f64
}

/// The bias-corrected estimate p̂ − p̂/(1−p̂), applied verbatim.
/// Singular at p̂ = 1.
pub fn bias_corrected_p(p_hat: f64) -> Result<f64> {
    if !(p_hat > 0.0 && p_hat < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bias correction requires p_hat in (0, 1), got {p_hat}"
        )));
    }
    Ok(p_hat - p_hat / (1.0 - p_hat))
}

/// Sample-size-adjusted variance estimate (1/(n−1))·(1−p̂)/p̂².
pub fn mleb_variance(p_hat: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "variance estimation needs n >= 2".into(),
        ));
    }
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_hat must lie in (0, 1], got {p_hat}"
        )));
    }
    Ok((1.0 - p_hat) / ((n as f64 - 1.0) * p_hat * p_hat))
}

/// Confidence-interval centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CiMode {
    /// Center on the printed bias-corrected value p̂ − p̂/(1−p̂).
    #[default]
    Verbatim,
    /// Center on the mean waiting time 1/p̂.
    Standard,
}

/// Interval endpoints: center ± 1.96·σ̂/√n with σ̂² the adjusted
/// variance. Requires n ≥ 2 and p̂ < 1.
pub fn confidence_interval(times: &WaitingTimes, mode: CiMode) -> Result<(f64, f64)> {
    let n = times.n();
    let p_hat = mle_p(times);
    let center = match mode {
        CiMode::Verbatim => bias_corrected_p(p_hat)?,
        CiMode::Standard => {
            if !(p_hat > 0.0 && p_hat < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "interval requires p_hat in (0, 1), got {p_hat}"
                )));
            }
            1.0 / p_hat
        }
    };
    let half_width = Z_95 * mleb_variance(p_hat, n)?.sqrt() / (n as f64).sqrt();
    Ok((center - half_width, center + half_width))
}

/// Summary of one stop-parameter estimation run.
#[derive(Debug, Clone)]
pub struct StopStatistics {
    /// Waiting-time sample size n.
    pub n: usize,
    /// Maximum-likelihood estimate p̂.
    pub p_hat: f64,
    /// Bias-corrected value; absent when p̂ = 1 (singular).
    pub p_bc: Option<f64>,
    /// Adjusted variance; absent when n < 2.
    pub var_mleb: Option<f64>,
    /// Interval endpoints; absent on the degenerate paths above.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Chosen stop parameter X ≥ 1.
    pub x_selected: u64,
}

/// Estimate the stop parameter for one (λ, bias) combination.
///
/// Runs one probe training (check interval 1, halting disabled,
/// `iterations` steps), estimates the improvement statistics, collects
/// the integer candidates inside the interval (clamped to [1, T] and
/// falling back to {1} when the intersection is empty or the sample is
/// degenerate), scores each candidate with a halting-enabled training
/// run, and returns the candidate with the best final training AUC
/// (ties go to the smallest X).
pub fn select_stop_parameter(
    dataset: &Dataset,
    lambda: f64,
    bias: f64,
    iterations: u64,
    seed: u64,
    mode: CiMode,
) -> Result<StopStatistics> {
    let probe_config = LinearConfig::new(
        lambda,
        bias,
        iterations,
        1,
        derive_seed(seed, &[salt::STOP_PROBE]),
    )
    .with_halt(HaltRule::Never);
    let (_, trace) = train_linear(dataset, &probe_config)?;
    let times = collect_waiting_times(&trace)?;
    let n = times.n();
    let p_hat = mle_p(&times);

    let (p_bc, var_mleb, ci, candidates) = if p_hat < 1.0 && n >= 2 {
        let p_bc = bias_corrected_p(p_hat)?;
        let var = mleb_variance(p_hat, n)?;
        let (low, high) = confidence_interval(&times, mode)?;
        let first = low.ceil().max(1.0);
        let last = high.floor().min(iterations as f64);
        let candidates: Vec<u64> = if first <= last {
            (first as u64..=last as u64).collect()
        } else {
            vec![1]
        };
        (Some(p_bc), Some(var), Some((low, high)), candidates)
    } else {
        // Improvement at every check (p̂ = 1) or a single waiting time:
        // no interval exists; check every iteration.
        let var = if n >= 2 { Some(mleb_variance(p_hat, n)?) } else { None };
        (None, var, None, vec![1])
    };

    let scores: Vec<(u64, f64)> = candidates
        .par_iter()
        .map(|&x| -> Result<(u64, f64)> {
            let config = LinearConfig::new(
                lambda,
                bias,
                iterations,
                x,
                derive_seed(seed, &[salt::STOP_CANDIDATE, x]),
            );
            let (model, _) = train_linear(dataset, &config)?;
            let auc = auc_ranked(&model.decision_scores(dataset)?, &dataset.labels());
            Ok((x, auc))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = scores[0];
    for &(x, auc) in &scores[1..] {
        if auc > best.1 {
            best = (x, auc);
        }
    }

    Ok(StopStatistics {
        n,
        p_hat,
        p_bc,
        var_mleb,
        ci_low: ci.map(|c| c.0),
        ci_high: ci.map(|c| c.1),
        x_selected: best.0,
    })
}
