//! Stratified k-fold cross-validation, (λ, bias) grid search with
//! per-combination stop parameters, learning and validation curves, and
//! holdout evaluation.
//!
//! Every task (grid point, fold, subsample) derives its seed from the
//! run's base seed and its indices, so parallel execution cannot perturb
//! results and reruns reproduce every score bit for bit.

use rayon::prelude::*;

use crate::data::{split_holdout, Dataset};
use crate::error::{Error, Result};
use crate::kernel::{train_kernel, KernelConfig, KernelSpec};
use crate::linear::{train_linear, LinearConfig};
use crate::metrics::auc_ranked;
use crate::rng::{derive_seed, rng_from_seed, salt, shuffle};
use crate::stop::{select_stop_parameter, CiMode};

/// Hyperparameter grid for [`grid_search`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub lambdas: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Default for GridSpec {
    /// Eight decades of regularization and ten evenly spaced biases in
    /// [−2, 2].
    fn default() -> Self {
        GridSpec {
            lambdas: vec![0.0001, 0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0],
            biases: linspace(-2.0, 2.0, 10),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.biases.is_empty() {
            return Err(Error::InvalidParameter("grid must be non-empty".into()));
        }
        if self.lambdas.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidParameter("lambdas must all be positive".into()));
        }
        Ok(())
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// One train/validation index partition.
#[derive(Debug, Clone)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Stratified k-fold partitions: each class is shuffled and dealt
/// round-robin across folds, so per-fold class counts differ by at most
/// one within each class and every fold keeps both classes.
pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("folds must be >= 2, got {k}")));
    }
    for (name, count) in [
        ("positive", dataset.n_plus()),
        ("negative", dataset.n_minus()),
    ] {
        if count < k {
            return Err(Error::ClassTooSmall {
                class: name,
                count,
                needed: k,
            });
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut validation: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class_indices in [dataset.positive_indices(), dataset.negative_indices()] {
        let mut shuffled = class_indices.to_vec();
        shuffle(&mut shuffled, &mut rng);
        for (i, index) in shuffled.into_iter().enumerate() {
            validation[i % k].push(index);
        }
    }
    let folds = validation
        .into_iter()
        .map(|mut val| {
            val.sort_unstable();
            let train = (0..dataset.len())
                .filter(|i| val.binary_search(i).is_err())
                .collect();
            Fold { train, validation: val }
        })
        .collect();
    Ok(folds)
}

/// Per-fold AUC scores from one cross-validation pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldScore {
    pub fold: usize,
    pub train_auc: f64,
    pub validation_auc: f64,
}

/// Train on each fold's training partition and score both partitions.
/// Fold `f` trains with seed `derive_seed(seed, [FOLD, f])`.
pub fn cross_validate(
    dataset: &Dataset,
    folds: &[Fold],
    lambda: f64,
    bias: f64,
    stop_x: u64,
    iterations: u64,
    seed: u64,
) -> Result<Vec<FoldScore>> {
    folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| -> Result<FoldScore> {
            let train = dataset.subset(&fold.train)?;
            let validation = dataset.subset(&fold.validation)?;
            let config = LinearConfig::new(
                lambda,
                bias,
                iterations,
                stop_x,
                derive_seed(seed, &[salt::FOLD, f as u64]),
            );
            let (model, _) = train_linear(&train, &config)?;
            let train_auc = auc_ranked(&model.decision_scores(&train)?, &train.labels());
            let validation_auc =
                auc_ranked(&model.decision_scores(&validation)?, &validation.labels());
            Ok(FoldScore {
                fold: f,
                train_auc,
                validation_auc,
            })
        })
        .collect()
}

/// Scores for one (λ, bias) grid combination.
#[derive(Debug, Clone)]
pub struct GridPointResult {
    pub lambda: f64,
    pub bias: f64,
    /// Stop parameter selected for this combination before
    /// cross-validation.
    pub stop_x: u64,
    /// Validation-fold AUCs, one per fold.
    pub fold_aucs: Vec<f64>,
    pub mean_auc: f64,
}

/// Full grid-search output.
#[derive(Debug, Clone)]
pub struct CVResult {
    /// One row per (λ, bias), in grid order (λ outer, bias inner).
    pub rows: Vec<GridPointResult>,
    /// Index of the best row (highest mean AUC, first in grid order on
    /// ties).
    pub best: usize,
}

impl CVResult {
    pub fn best_row(&self) -> &GridPointResult {
        &self.rows[self.best]
    }
}

/// Configuration for [`grid_search`].
#[derive(Debug, Clone)]
pub struct GridSearchConfig {
    pub folds: usize,
    pub iterations: u64,
    pub seed: u64,
    /// Interval centering used by the per-combination stop-parameter
    /// estimation.
    pub ci_mode: CiMode,
}

/// Exhaustive (λ, bias) search: for each combination the stop parameter
/// is estimated on the full training partition, then scored by
/// stratified k-fold cross-validation on validation-fold AUC.
pub fn grid_search(dataset: &Dataset, grid: &GridSpec, config: &GridSearchConfig) -> Result<CVResult> {
    grid.validate()?;
    let folds = stratified_kfold(dataset, config.folds, config.seed)?;
    let combos: Vec<(usize, usize)> = (0..grid.lambdas.len())
        .flat_map(|li| (0..grid.biases.len()).map(move |bi| (li, bi)))
        .collect();

    let rows: Vec<GridPointResult> = combos
        .par_iter()
        .map(|&(li, bi)| -> Result<GridPointResult> {
            let lambda = grid.lambdas[li];
            let bias = grid.biases[bi];
            let stop_seed = derive_seed(config.seed, &[salt::STOP_PROBE, li as u64, bi as u64]);
            let stats = select_stop_parameter(
                dataset,
                lambda,
                bias,
                config.iterations,
                stop_seed,
                config.ci_mode,
            )?;
            let point_seed = derive_seed(config.seed, &[salt::GRID_POINT, li as u64, bi as u64]);
            let scores = cross_validate(
                dataset,
                &folds,
                lambda,
                bias,
                stats.x_selected,
                config.iterations,
                point_seed,
            )?;
            let fold_aucs: Vec<f64> = scores.iter().map(|s| s.validation_auc).collect();
            let mean_auc = fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64;
            Ok(GridPointResult {
                lambda,
                bias,
                stop_x: stats.x_selected,
                fold_aucs,
                mean_auc,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.mean_auc > rows[best].mean_auc {
            best = i;
        }
    }
    Ok(CVResult { rows, best })
}

/// One row of a learning or validation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    /// Training proportion (learning curve) or hyperparameter value
    /// (validation curve).
    pub value: f64,
    pub fold: usize,
    pub train_auc: f64,
    pub validation_auc: f64,
}

/// Stratified subsample indices of approximately `proportion·m` rows
/// (per-class rounding), sorted ascending. A proportion of 1 returns
/// every index, making the full-data curve point coincide with plain
/// cross-validation.
fn stratified_subsample(dataset: &Dataset, proportion: f64, seed: u64) -> Result<Vec<usize>> {
    if !(proportion > 0.0 && proportion <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "proportion must lie in (0, 1], got {proportion}"
        )));
    }
    if proportion == 1.0 {
        return Ok((0..dataset.len()).collect());
    }
    let mut rng = rng_from_seed(seed);
    let mut selected = Vec::new();
    for class_indices in [dataset.positive_indices(), dataset.negative_indices()] {
        let mut shuffled = class_indices.to_vec();
        shuffle(&mut shuffled, &mut rng);
        let take = ((proportion * class_indices.len() as f64).round() as usize)
            .clamp(1, class_indices.len());
        selected.extend_from_slice(&shuffled[..take]);
    }
    selected.sort_unstable();
    Ok(selected)
}

/// Learning curve: k-fold cross-validation on stratified subsamples of
/// increasing size, recording train and validation AUC per fold.
pub fn learning_curve(
    dataset: &Dataset,
    lambda: f64,
    bias: f64,
    stop_x: u64,
    proportions: &[f64],
    k: usize,
    iterations: u64,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::with_capacity(proportions.len() * k);
    for (pi, &proportion) in proportions.iter().enumerate() {
        let indices = stratified_subsample(
            dataset,
            proportion,
            derive_seed(seed, &[salt::SUBSAMPLE, pi as u64]),
        )?;
        let subset = dataset.subset(&indices)?;
        let folds = stratified_kfold(&subset, k, seed)?;
        let scores = cross_validate(&subset, &folds, lambda, bias, stop_x, iterations, seed)?;
        rows.extend(scores.into_iter().map(|s| CurveRow {
            value: proportion,
            fold: s.fold,
            train_auc: s.train_auc,
            validation_auc: s.validation_auc,
        }));
    }
    Ok(rows)
}

/// Which hyperparameter a validation curve varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariedParam {
    Lambda,
    Bias,
}

/// Validation curve: one k-fold cross-validation per value of the varied
/// hyperparameter, the other one held fixed.
pub fn validation_curve(
    dataset: &Dataset,
    varied: VariedParam,
    values: &[f64],
    fixed_other: f64,
    stop_x: u64,
    k: usize,
    iterations: u64,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    let folds = stratified_kfold(dataset, k, seed)?;
    let mut rows = Vec::with_capacity(values.len() * k);
    for &value in values {
        let (lambda, bias) = match varied {
            VariedParam::Lambda => (value, fixed_other),
            VariedParam::Bias => (fixed_other, value),
        };
        let scores = cross_validate(dataset, &folds, lambda, bias, stop_x, iterations, seed)?;
        rows.extend(scores.into_iter().map(|s| CurveRow {
            value,
            fold: s.fold,
            train_auc: s.train_auc,
            validation_auc: s.validation_auc,
        }));
    }
    Ok(rows)
}

/// Train once on `train` and return the ROC-AUC of the decision scores
/// on `test`. A kernel spec switches to the kernel solver.
pub fn evaluate_holdout(
    train: &Dataset,
    test: &Dataset,
    lambda: f64,
    bias: f64,
    stop_x: u64,
    kernel: Option<&KernelSpec>,
    iterations: u64,
    seed: u64,
) -> Result<f64> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            got: test.dim(),
        });
    }
    let scores = match kernel {
        None => {
            let config = LinearConfig::new(lambda, bias, iterations, stop_x, seed);
            let (model, _) = train_linear(train, &config)?;
            model.decision_scores(test)?
        }
        Some(spec) => {
            let config = KernelConfig::new(lambda, *spec, bias, iterations, stop_x, seed);
            let (model, _) = train_kernel(train, &config)?;
            model.decision_scores(test)?
        }
    };
    Ok(auc_ranked(&scores, &test.labels()))
}

/// Split a dataset, train on the larger part, and score the holdout.
pub fn holdout_evaluation(
    dataset: &Dataset,
    test_fraction: f64,
    lambda: f64,
    bias: f64,
    stop_x: u64,
    kernel: Option<&KernelSpec>,
    iterations: u64,
    seed: u64,
) -> Result<f64> {
    let (train, test) = split_holdout(dataset, 1.0 - test_fraction, seed)?;
    evaluate_holdout(&train, &test, lambda, bias, stop_x, kernel, iterations, seed)
}
