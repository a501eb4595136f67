//! Class-weighted linear PEGASOS trained by stochastic subgradient
//! descent with the formula step size 1/(λt), a fixed (never learned)
//! bias offset, an optional projection onto the ball of radius 1/√λ,
//! and the AUC-improvement halt rule.

use crate::data::{ClassWeights, Dataset, LabeledPoint};
use crate::error::{Error, Result};
use crate::metrics::auc_ranked;
use crate::sampler::BalancedSampler;
use crate::trace::{AucMonitor, HaltRule, TrainingTrace};

/// Trained linear model: decision score is ⟨w, x⟩ + b.
#[derive(Debug, Clone)]
pub struct LinearModel {
    /// Weight vector, dimension d.
    pub w: Vec<f64>,
    /// Fixed bias offset; taken as input and never updated.
    pub b: f64,
    pub lambda: f64,
    /// Steps actually applied (less than the budget when halted early).
    pub iterations_run: u64,
    pub seed: u64,
}

impl LinearModel {
    /// Per-row decision scores ⟨w, xᵢ⟩ + b in dataset row order.
    pub fn decision_scores(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        if dataset.dim() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                got: dataset.dim(),
            });
        }
        Ok(dataset
            .points()
            .iter()
            .map(|p| dot(&self.w, &p.features) + self.b)
            .collect())
    }
}

/// Training configuration for [`train_linear`].
#[derive(Debug, Clone)]
pub struct LinearConfig {
    pub lambda: f64,
    /// Fixed bias offset b.
    pub bias: f64,
    /// Iteration budget T.
    pub iterations: u64,
    /// Stop parameter X: the AUC is checked every X iterations.
    pub check_every: u64,
    /// Rescale w onto the 1/√λ ball after each step.
    pub projection: bool,
    pub seed: u64,
    pub halt: HaltRule,
}

impl LinearConfig {
    pub fn new(lambda: f64, bias: f64, iterations: u64, check_every: u64, seed: u64) -> Self {
        LinearConfig {
            lambda,
            bias,
            iterations,
            check_every,
            projection: false,
            seed,
            halt: HaltRule::OnNoImprovement,
        }
    }

    pub fn with_projection(mut self, enabled: bool) -> Self {
        self.projection = enabled;
        self
    }

    pub fn with_halt(mut self, rule: HaltRule) -> Self {
        self.halt = rule;
        self
    }

    fn validate(&self) -> Result<()> {
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

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Class-weighted hinge objective
/// (λ/2)‖w‖² + Σ₊ (1/(2n₊))·[1 − (⟨w,x⟩+b)]₊ + Σ₋ (1/(2n₋))·[1 + (⟨w,x⟩+b)]₊.
pub fn hinge_objective(model: &LinearModel, dataset: &Dataset) -> Result<f64> {
    if dataset.dim() != model.w.len() {
        return Err(Error::DimensionMismatch {
            expected: model.w.len(),
            got: dataset.dim(),
        });
    }
    let weights = dataset.class_weights();
    let norm_sq: f64 = model.w.iter().map(|x| x * x).sum();
    let mut objective = model.lambda / 2.0 * norm_sq;
    for point in dataset.points() {
        let score = dot(&model.w, &point.features) + model.b;
        let hinge = (1.0 - point.label.signum() * score).max(0.0);
        objective += weights.of(point.label) * hinge;
    }
    Ok(objective)
}

/// One PEGASOS update, in place. Returns whether the sampled point
/// violated the margin (y(⟨w,x⟩+b) < 1).
///
/// On a violation the subgradient carries the sampled row's class
/// weight: w ← (1−1/t)·w + (1/(λt))·c·y·x; otherwise only the
/// (1−1/t) shrink applies.
pub fn pegasos_step(
    w: &mut [f64],
    sample: &LabeledPoint,
    t: u64,
    lambda: f64,
    bias: f64,
    weights: &ClassWeights,
) -> Result<bool> {
    if t == 0 {
        return Err(Error::InvalidParameter("iteration index starts at 1".into()));
    }
    if w.len() != sample.features.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: sample.features.len(),
        });
    }
    let y = sample.label.signum();
    let margin = y * (dot(w, &sample.features) + bias);
    let shrink = 1.0 - 1.0 / t as f64;
    let violated = margin < 1.0;
    if violated {
        let scale = weights.of(sample.label) * y / (lambda * t as f64);
        for (wi, xi) in w.iter_mut().zip(&sample.features) {
            *wi = shrink * *wi + scale * xi;
        }
    } else {
        for wi in w.iter_mut() {
            *wi *= shrink;
        }
    }
    Ok(violated)
}

/// Rescale w onto the ball of radius 1/√λ: w ← min{1, (1/√λ)/‖w‖}·w.
/// The zero vector is a fixed point.
pub fn project(w: &mut [f64], lambda: f64) {
    let norm = dot(w, w).sqrt();
    let radius = 1.0 / lambda.sqrt();
    if norm > radius {
        let scale = radius / norm;
        for wi in w.iter_mut() {
            *wi *= scale;
        }
    }
}

/// Step-by-step driver for the linear solver. [`train_linear`] wraps it;
/// tests can drive it directly to observe per-step state.
pub struct LinearStepper<'a> {
    dataset: &'a Dataset,
    weights: ClassWeights,
    config: LinearConfig,
    sampler: BalancedSampler<'a>,
    w: Vec<f64>,
    t: u64,
}

/// What happened at one step of the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// Iteration index (1-based).
    pub t: u64,
    /// Row index that was sampled.
    pub row: usize,
    /// Whether the sampled row violated the margin.
    pub violated: bool,
}

impl<'a> LinearStepper<'a> {
    pub fn new(dataset: &'a Dataset, config: &LinearConfig) -> Result<Self> {
        config.validate()?;
        Ok(LinearStepper {
            dataset,
            weights: dataset.class_weights(),
            config: config.clone(),
            sampler: BalancedSampler::new(dataset, config.seed),
            w: vec![0.0; dataset.dim()],
            t: 0,
        })
    }

    /// Apply the next iteration: sample, update, optionally project.
    pub fn step(&mut self) -> StepOutcome {
        self.t += 1;
        let (row, point) = self.sampler.next_sample();
        let violated = pegasos_step(
            &mut self.w,
            point,
            self.t,
            self.config.lambda,
            self.config.bias,
            &self.weights,
        )
        .expect("validated dimensions");
        if self.config.projection {
            project(&mut self.w, self.config.lambda);
        }
        StepOutcome {
            t: self.t,
            row,
            violated,
        }
    }

    /// Completed iterations so far.
    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Current training-set decision scores ⟨w, xᵢ⟩ + b.
    pub fn training_scores(&self) -> Vec<f64> {
        self.dataset
            .points()
            .iter()
            .map(|p| dot(&self.w, &p.features) + self.config.bias)
            .collect()
    }

    fn into_model(self) -> LinearModel {
        LinearModel {
            w: self.w,
            b: self.config.bias,
            lambda: self.config.lambda,
            iterations_run: self.t,
            seed: self.config.seed,
        }
    }
}

/// Train a linear model: w starts at 0; every `check_every` iterations
/// the training-set AUC is measured and the run halts if it fails to
/// strictly exceed the best value seen so far (baseline 0.5).
pub fn train_linear(dataset: &Dataset, config: &LinearConfig) -> Result<(LinearModel, TrainingTrace)> {
    let mut stepper = LinearStepper::new(dataset, config)?;
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
