//! Implementations of the five subcommands.
//!
//! All tabular output is CSV with fixed headers; floating-point fields
//! use the shortest round-trip encoding, so reruns with the same seed
//! produce byte-identical files. Human-facing AUC lines print four
//! decimal places.

use std::path::Path;

use pegasos_core::{
    auc_pairwise, grid_search, learning_curve, load_csv, roc_curve, select_stop_parameter,
    split_holdout, train_kernel, train_linear, validation_curve, CiMode, Dataset,
    GridSearchConfig, GridSpec, KernelConfig, LinearConfig, ScoredLabels, VariedParam,
};

use crate::model_file::{unix_timestamp, Hyperparameters, ModelFile, Provenance};
use crate::{
    resolve_seed, CiModeChoice, CliError, CurveType, CurvesArgs, CvArgs, DataArgs,
    EstimateStopArgs, EvaluateArgs, TrainArgs, VaryChoice,
};

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

fn load_data(args: &DataArgs) -> Result<Dataset, CliError> {
    Ok(load_csv(&args.data, &args.target_col, &args.positive_label)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_f64_list(list: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|token| {
            token.trim().parse::<f64>().map_err(|_| {
                CliError::Usage(format!("{flag}: cannot parse '{token}' as a number"))
            })
        })
        .collect()
}

/// Parse the bias-grid syntax linspace:LO:HI:N.
fn parse_linspace(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || usage("--bias-grid must have the form linspace:LO:HI:N");
    if parts.len() != 4 || parts[0] != "linspace" {
        return Err(err());
    }
    let lo: f64 = parts[1].parse().map_err(|_| err())?;
    let hi: f64 = parts[2].parse().map_err(|_| err())?;
    let n: usize = parts[3].parse().map_err(|_| err())?;
    if n == 0 {
        return Err(err());
    }
    Ok(pegasos_core::linspace(lo, hi, n))
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let kernel_spec = args.kernel.spec()?;
    if args.projection && kernel_spec.is_some() {
        return Err(usage("--projection applies to the primal linear solver only"));
    }
    let dataset = load_data(&args.data)?;
    let hyper = Hyperparameters {
        lambda: args.lambda,
        bias: args.bias,
        iterations: args.iterations,
        check_every: args.check_every,
        seed,
        projection: args.projection,
        kernel: kernel_spec,
    };
    let provenance = Provenance {
        data_path: args.data.data.display().to_string(),
        target_column: args.data.target_col.clone(),
        positive_label: args.data.positive_label.clone(),
        timestamp: unix_timestamp(),
    };
    let (scores, iterations_run, file) = match kernel_spec {
        None => {
            let config = LinearConfig::new(
                args.lambda,
                args.bias,
                args.iterations,
                args.check_every,
                seed,
            )
            .with_projection(args.projection);
            let (model, _) = train_linear(&dataset, &config)?;
            let scores = model.decision_scores(&dataset)?;
            let run = model.iterations_run;
            (scores, run, ModelFile::from_linear(&model, hyper, provenance))
        }
        Some(spec) => {
            let config = KernelConfig::new(
                args.lambda,
                spec,
                args.bias,
                args.iterations,
                args.check_every,
                seed,
            );
            let (model, _) = train_kernel(&dataset, &config)?;
            let scores = model.decision_scores(&dataset)?;
            let run = model.t_final;
            (scores, run, ModelFile::from_kernel(&model, hyper, provenance))
        }
    };
    let auc = auc_pairwise(&ScoredLabels::new(scores, dataset.labels())?);
    file.save(&args.output)?;
    println!("training AUC: {auc:.4}");
    println!("iterations run: {iterations_run}");
    println!("model written to {}", args.output.display());
    Ok(())
}

pub fn cv(args: CvArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let dataset = load_data(&args.data)?;
    let grid = GridSpec {
        lambdas: parse_f64_list(&args.lambda_grid, "--lambda-grid")?,
        biases: parse_linspace(&args.bias_grid)?,
    };
    let config = GridSearchConfig {
        folds: args.folds,
        iterations: args.iterations,
        seed,
        ci_mode: CiMode::Verbatim,
    };
    let result = grid_search(&dataset, &grid, &config)?;

    let mut scores_csv = String::from("lambda,bias,stop_x,fold,auc\n");
    let mut fold_rows = 0;
    for row in &result.rows {
        for (fold, auc) in row.fold_aucs.iter().enumerate() {
            scores_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                row.lambda, row.bias, row.stop_x, fold, auc
            ));
            fold_rows += 1;
        }
    }
    write_file(&args.out, &scores_csv)?;

    let mut summary_csv = String::from("lambda,bias,stop_x,mean_auc\n");
    for row in &result.rows {
        summary_csv.push_str(&format!(
            "{},{},{},{}\n",
            row.lambda, row.bias, row.stop_x, row.mean_auc
        ));
    }
    write_file(&args.summary_out, &summary_csv)?;

    let best = result.best_row();
    println!("wrote {fold_rows} fold scores to {}", args.out.display());
    println!(
        "wrote {} combination summaries to {}",
        result.rows.len(),
        args.summary_out.display()
    );
    println!(
        "best: lambda={} bias={} stop_x={} mean_auc={:.4}",
        best.lambda, best.bias, best.stop_x, best.mean_auc
    );
    Ok(())
}

pub fn curves(args: CurvesArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let dataset = load_data(&args.data)?;
    let rows = match args.curve_type {
        CurveType::Learning => {
            let lambda = args
                .lambda
                .ok_or_else(|| usage("--lambda is required for learning curves"))?;
            let bias = args
                .bias
                .ok_or_else(|| usage("--bias is required for learning curves"))?;
            let proportions = parse_f64_list(&args.proportions, "--proportions")?;
            learning_curve(
                &dataset,
                lambda,
                bias,
                args.check_every,
                &proportions,
                args.folds,
                args.iterations,
                seed,
            )?
        }
        CurveType::Validation => {
            let vary = args
                .vary
                .ok_or_else(|| usage("--vary is required for validation curves"))?;
            let values = parse_f64_list(
                args.values
                    .as_deref()
                    .ok_or_else(|| usage("--values is required for validation curves"))?,
                "--values",
            )?;
            let (varied, fixed_other) = match vary {
                VaryChoice::Lambda => (
                    VariedParam::Lambda,
                    args.bias
                        .ok_or_else(|| usage("--bias (held fixed) is required when varying lambda"))?,
                ),
                VaryChoice::Bias => (
                    VariedParam::Bias,
                    args.lambda
                        .ok_or_else(|| usage("--lambda (held fixed) is required when varying bias"))?,
                ),
            };
            validation_curve(
                &dataset,
                varied,
                &values,
                fixed_other,
                args.check_every,
                args.folds,
                args.iterations,
                seed,
            )?
        }
    };
    let mut csv = String::from("proportion_or_value,fold,train_auc,cv_auc\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.value, row.fold, row.train_auc, row.validation_auc
        ));
    }
    write_file(&args.out, &csv)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let (scores, labels) = match (&args.model, args.holdout) {
        (Some(model_path), None) => {
            let file = ModelFile::load(model_path)?;
            let target_col = args
                .target_col
                .clone()
                .unwrap_or_else(|| file.provenance.target_column.clone());
            let positive_label = args
                .positive_label
                .clone()
                .unwrap_or_else(|| file.provenance.positive_label.clone());
            let dataset = load_csv(&args.data, &target_col, &positive_label)?;
            let scores = file.score(&dataset)?;
            (scores, dataset.labels())
        }
        (None, Some(fraction)) => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(usage("--holdout must lie in (0, 1)"));
            }
            let target_col = args
                .target_col
                .clone()
                .ok_or_else(|| usage("--target-col is required with --holdout"))?;
            let positive_label = args
                .positive_label
                .clone()
                .ok_or_else(|| usage("--positive-label is required with --holdout"))?;
            let lambda = args
                .lambda
                .ok_or_else(|| usage("--lambda is required with --holdout"))?;
            let bias = args.bias.ok_or_else(|| usage("--bias is required with --holdout"))?;
            let check_every = args
                .check_every
                .ok_or_else(|| usage("--check-every is required with --holdout"))?;
            let dataset = load_csv(&args.data, &target_col, &positive_label)?;
            let (train, test) = split_holdout(&dataset, 1.0 - fraction, seed)?;
            let scores = match args.kernel.spec()? {
                None => {
                    let config = LinearConfig::new(lambda, bias, args.iterations, check_every, seed);
                    let (model, _) = train_linear(&train, &config)?;
                    model.decision_scores(&test)?
                }
                Some(spec) => {
                    let config =
                        KernelConfig::new(lambda, spec, bias, args.iterations, check_every, seed);
                    let (model, _) = train_kernel(&train, &config)?;
                    model.decision_scores(&test)?
                }
            };
            (scores, test.labels())
        }
        _ => return Err(usage("provide exactly one of --model or --holdout")),
    };
    let scored = ScoredLabels::new(scores, labels)?;
    let auc = auc_pairwise(&scored);
    println!("test AUC: {auc:.4}");
    if let Some(path) = &args.roc_out {
        let curve = roc_curve(&scored);
        let mut csv = String::from("fpr,tpr\n");
        for point in &curve {
            csv.push_str(&format!("{},{}\n", point.fpr, point.tpr));
        }
        write_file(path, &csv)?;
        println!("wrote {} ROC points to {}", curve.len(), path.display());
    }
    Ok(())
}

pub fn estimate_stop(args: EstimateStopArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let dataset = load_data(&args.data)?;
    let mode = match args.mode {
        CiModeChoice::Verbatim => CiMode::Verbatim,
        CiModeChoice::Standard => CiMode::Standard,
    };
    let stats = select_stop_parameter(&dataset, args.lambda, args.bias, args.iterations, seed, mode)?;
    println!("n: {}", stats.n);
    println!("p_hat: {:.6}", stats.p_hat);
    match stats.p_bc {
        Some(value) => println!("bias_corrected: {value:.6}"),
        None => println!("bias_corrected: n/a"),
    }
    match stats.var_mleb {
        Some(value) => println!("mleb_variance: {value:.6}"),
        None => println!("mleb_variance: n/a"),
    }
    match (stats.ci_low, stats.ci_high) {
        (Some(low), Some(high)) => println!("ci: [{low:.6}, {high:.6}]"),
        _ => println!("ci: n/a"),
    }
    println!("x_selected: {}", stats.x_selected);
    Ok(())
}
