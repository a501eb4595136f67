//! Cost-sensitive PEGASOS SVM for imbalanced binary classification.
//!
//! The solver minimizes the class-weighted primal SVM objective by
//! stochastic subgradient descent with the formula step size 1/(λt),
//! drawing each iteration's training point from both classes with equal
//! probability so that every positive row carries loss weight 1/(2·n₊)
//! and every negative row 1/(2·n₋). Training halts early when the
//! training-set ROC-AUC stops improving at periodic checks; the check
//! interval itself is estimated by modeling improvement waiting times
//! as a geometric distribution.
//!
//! Modules:
//! - [`data`]: datasets, CSV ingestion, class weights, holdout splits
//! - [`sampler`]: seeded balanced per-iteration sampling
//! - [`linear`]: the primal linear solver
//! - [`kernel`]: the kernelized solver with support coefficients
//! - [`metrics`]: ROC curves and AUC (trapezoidal and pairwise)
//! - [`stop`]: geometric waiting-time statistics and stop-parameter
//!   selection
//! - [`select`]: stratified k-fold CV, grid search, curves, holdout
//!   evaluation

pub mod data;
pub mod error;
pub mod kernel;
pub mod linear;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod select;
pub mod stop;
pub mod trace;

pub use data::{load_csv, split_holdout, ClassWeights, Dataset, Label, LabeledPoint};
pub use error::{Error, Result};
pub use kernel::{
    kernel_decision, kernel_eval, train_kernel, KernelConfig, KernelModel, KernelSpec,
};
pub use linear::{
    hinge_objective, pegasos_step, project, train_linear, LinearConfig, LinearModel,
};
pub use metrics::{auc_pairwise, auc_trapezoid, roc_curve, RocPoint, ScoredLabels};
pub use select::{
    cross_validate, evaluate_holdout, grid_search, holdout_evaluation, learning_curve, linspace,
    stratified_kfold, validation_curve, CVResult, CurveRow, Fold, FoldScore, GridSearchConfig,
    GridSpec, VariedParam,
};
pub use stop::{
    bias_corrected_p, collect_waiting_times, confidence_interval, mle_p, mleb_variance,
    select_stop_parameter, CiMode, StopStatistics, WaitingTimes,
};
pub use trace::{AucCheck, HaltRule, TrainingTrace};
