//! Kernelized class-weighted PEGASOS.
//!
//! Instead of a weight vector, the solver keeps one support coefficient
//! per training row. A row's coefficient grows by that row's class
//! weight each time the row is sampled while violating the margin, so
//! every α entry is a class-weight-quantized violation count and never
//! decreases. With the linear kernel the decision function reproduces
//! the primal solver exactly: at any point, α normalized by 1/(λ·steps)
//! equals the primal w in feature space.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::linear::dot;
use crate::metrics::auc_ranked;
use crate::sampler::BalancedSampler;
use crate::trace::{AucMonitor, HaltRule, TrainingTrace};

/// Above this row count the training kernel matrix is not materialized;
/// kernel rows are recomputed on demand instead.
pub const KERNEL_CACHE_MAX_ROWS: usize = 2000;

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// K(x, x') = ⟨x, x'⟩
    Linear,
    /// K(x, x') = exp(−gamma·‖x − x'‖²)
    Rbf { gamma: f64 },
    /// K(x, x') = (⟨x, x'⟩ + coef0)^degree
    Polynomial { degree: u32, coef0: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } => {
                if *gamma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )))
                }
            }
            KernelSpec::Polynomial { degree, .. } => {
                if *degree >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("polynomial degree must be >= 1".into()))
                }
            }
        }
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { gamma } => {
                let dist_sq: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-gamma * dist_sq).exp()
            }
            KernelSpec::Polynomial { degree, coef0 } => (dot(x, y) + coef0).powi(*degree as i32),
        }
    }
}

/// Evaluate a kernel on two equal-dimension vectors.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(spec.eval_unchecked(x, y))
}

/// Trained kernel model.
#[derive(Debug, Clone)]
pub struct KernelModel {
    /// Support coefficients, one per training row; each is a
    /// non-negative integer multiple of the row's class weight.
    pub alpha: Vec<f64>,
    /// Training rows the coefficients refer to.
    pub support_points: Vec<Vec<f64>>,
    /// Their labels.
    pub labels: Vec<Label>,
    pub kernel: KernelSpec,
    /// Fixed bias offset.
    pub b: f64,
    pub lambda: f64,
    /// Completed iterations; the decision normalization 1/(λ·t_final)
    /// refers to this count.
    pub t_final: u64,
    pub seed: u64,
}

impl KernelModel {
    /// Feature dimension of the support rows.
    pub fn dim(&self) -> usize {
        self.support_points.first().map_or(0, Vec::len)
    }

    /// Decision score for one point at the model's final iteration scale.
    pub fn decision_score(&self, x: &[f64]) -> Result<f64> {
        kernel_decision(self, x, self.t_final)
    }

    /// Per-row decision scores on a dataset, in row order.
    pub fn decision_scores(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        dataset
            .points()
            .iter()
            .map(|p| self.decision_score(&p.features))
            .collect()
    }
}

/// Kernel decision function (1/(λt))·Σⱼ αⱼ·yⱼ·K(x, xⱼ) + b, where t is
/// the number of iterations over which α was accumulated.
pub fn kernel_decision(model: &KernelModel, x: &[f64], t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidParameter("iteration scale must be >= 1".into()));
    }
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x.len(),
        });
    }
    let mut sum = 0.0;
    for ((alpha, point), label) in model
        .alpha
        .iter()
        .zip(&model.support_points)
        .zip(&model.labels)
    {
        if *alpha != 0.0 {
            sum += alpha * label.signum() * model.kernel.eval_unchecked(x, point);
        }
    }
    Ok(sum / (model.lambda * t as f64) + model.b)
}

/// Training configuration for [`train_kernel`].
#[derive(Debug, Clone)]
pub struct KernelConfig {
    pub lambda: f64,
    pub kernel: KernelSpec,
    /// Fixed bias offset b.
    pub bias: f64,
    /// Iteration budget T.
    pub iterations: u64,
    /// Stop parameter X.
    pub check_every: u64,
    pub seed: u64,
    pub halt: HaltRule,
}

impl KernelConfig {
    pub fn new(
        lambda: f64,
        kernel: KernelSpec,
        bias: f64,
        iterations: u64,
        check_every: u64,
        seed: u64,
    ) -> Self {
        KernelConfig {
            lambda,
            kernel,
            bias,
            iterations,
            check_every,
            seed,
            halt: HaltRule::OnNoImprovement,
        }
    }

    pub fn with_halt(mut self, rule: HaltRule) -> Self {
        self.halt = rule;
        self
    }

    fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        if self.check_every == 0 {
            return Err(Error::InvalidParameter("check interval must be >= 1".into()));
        }
        Ok(())
    }
}

/// Symmetric training-kernel lookup, materialized for small datasets.
enum KernelRows {
    Cached(Vec<f64>, usize),
    OnDemand,
}

/// Step-by-step driver for the kernel solver.
pub struct KernelStepper<'a> {
    dataset: &'a Dataset,
    config: KernelConfig,
    sampler: BalancedSampler<'a>,
    alpha: Vec<f64>,
    /// rawᵣ = Σⱼ α[j]·yⱼ·K(xᵣ, xⱼ), maintained incrementally so margin
    /// checks and AUC sweeps cost O(1) and O(m) per step.
    raw_scores: Vec<f64>,
    rows: KernelRows,
    t: u64,
}

/// What happened at one kernel step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelStepOutcome {
    pub t: u64,
    pub row: usize,
    pub violated: bool,
}

impl<'a> KernelStepper<'a> {
    pub fn new(dataset: &'a Dataset, config: &KernelConfig) -> Result<Self> {
        Self::with_cache_limit(dataset, config, KERNEL_CACHE_MAX_ROWS)
    }

    /// `cache_limit` is the largest row count for which the full m×m
    /// kernel matrix is materialized (exposed for tests).
    pub fn with_cache_limit(
        dataset: &'a Dataset,
        config: &KernelConfig,
        cache_limit: usize,
    ) -> Result<Self> {
        config.validate()?;
        let m = dataset.len();
        let rows = if m <= cache_limit {
            let mut matrix = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    let value = config
                        .kernel
                        .eval_unchecked(&dataset.point(i).features, &dataset.point(j).features);
                    matrix[i * m + j] = value;
                    matrix[j * m + i] = value;
                }
            }
            KernelRows::Cached(matrix, m)
        } else {
            KernelRows::OnDemand
        };
        Ok(KernelStepper {
            dataset,
            config: config.clone(),
            sampler: BalancedSampler::new(dataset, config.seed),
            alpha: vec![0.0; m],
            raw_scores: vec![0.0; m],
            rows,
            t: 0,
        })
    }

    /// Apply the next iteration: sample a row, test its margin against
    /// the decision accumulated so far, bump its coefficient on a
    /// violation.
    pub fn step(&mut self) -> KernelStepOutcome {
        let completed = self.t;
        self.t += 1;
        let (row, point) = self.sampler.next_sample();

        // Margin uses α normalized by the completed step count, which is
        // exactly ⟨w_t, x⟩ + b of the primal solver. At the first step α
        // is all zero and the decision reduces to the bias alone.
        let decision = if completed == 0 {
            self.config.bias
        } else {
            self.raw_scores[row] / (self.config.lambda * completed as f64) + self.config.bias
        };
        let violated = point.label.signum() * decision < 1.0;
        if violated {
            let weight = self.dataset.class_weight(point.label);
            self.alpha[row] += weight;
            let delta = weight * point.label.signum();
            match &self.rows {
                KernelRows::Cached(matrix, m) => {
                    let base = row * m;
                    for (r, raw) in self.raw_scores.iter_mut().enumerate() {
                        *raw += delta * matrix[base + r];
                    }
                }
                KernelRows::OnDemand => {
                    let features = &point.features;
                    for (r, raw) in self.raw_scores.iter_mut().enumerate() {
                        *raw += delta
                            * self
                                .config
                                .kernel
                                .eval_unchecked(features, &self.dataset.point(r).features);
                    }
                }
            }
        }
        KernelStepOutcome {
            t: self.t,
            row,
            violated,
        }
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Training-set decision scores at the current iteration scale.
    pub fn training_scores(&self) -> Vec<f64> {
        let scale = self.config.lambda * self.t.max(1) as f64;
        self.raw_scores
            .iter()
            .map(|raw| raw / scale + self.config.bias)
            .collect()
    }

    fn into_model(self) -> KernelModel {
        KernelModel {
            alpha: self.alpha,
            support_points: self
                .dataset
                .points()
                .iter()
                .map(|p| p.features.clone())
                .collect(),
            labels: self.dataset.labels(),
            kernel: self.config.kernel,
            b: self.config.bias,
            lambda: self.config.lambda,
            t_final: self.t,
            seed: self.config.seed,
        }
    }
}

/// Train a kernel model with the same sampling, checking, and halting
/// scheme as the linear solver.
pub fn train_kernel(dataset: &Dataset, config: &KernelConfig) -> Result<(KernelModel, TrainingTrace)> {
    let mut stepper = KernelStepper::new(dataset, config)?;
    let mut monitor = AucMonitor::new(config.halt);
    let labels = dataset.labels();
    let mut halted = false;
    for t in 1..=config.iterations {
        stepper.step();
        if t % config.check_every == 0 {
            let auc = auc_ranked(&stepper.training_scores(), &labels);
            if monitor.record(t, auc) {
                halted = true;
                break;
            }
        }
    }
    Ok((stepper.into_model(), monitor.into_trace(halted)))
}
