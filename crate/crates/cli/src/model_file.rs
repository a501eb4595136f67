//! Versioned JSON model persistence.
//!
//! The file carries everything needed to reproduce decision scores
//! bit for bit: the weight vector for linear models, the support
//! coefficients plus rows and labels for kernel models, and the full
//! hyperparameter set. Floats survive the JSON round trip exactly
//! (shortest-round-trip encoding), so a reloaded model scores
//! identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use pegasos_core::{Dataset, KernelModel, KernelSpec, Label, LinearModel};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelType {
    Linear,
    Kernel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub lambda: f64,
    pub bias: f64,
    pub iterations: u64,
    pub check_every: u64,
    pub seed: u64,
    pub projection: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSection {
    pub weights: Vec<f64>,
    pub iterations_run: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSection {
    pub alpha: Vec<f64>,
    pub support_points: Vec<Vec<f64>>,
    /// Labels as ±1.
    pub labels: Vec<i8>,
    pub t_final: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub data_path: String,
    pub target_column: String,
    pub positive_label: String,
    /// Unix seconds at save time; excluded from reproducibility
    /// comparisons.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub model_type: ModelType,
    pub hyperparameters: Hyperparameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSection>,
    pub provenance: Provenance,
}

impl ModelFile {
    pub fn from_linear(
        model: &LinearModel,
        hyper: Hyperparameters,
        provenance: Provenance,
    ) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            model_type: ModelType::Linear,
            hyperparameters: hyper,
            linear: Some(LinearSection {
                weights: model.w.clone(),
                iterations_run: model.iterations_run,
            }),
            kernel: None,
            provenance,
        }
    }

    pub fn from_kernel(
        model: &KernelModel,
        hyper: Hyperparameters,
        provenance: Provenance,
    ) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            model_type: ModelType::Kernel,
            hyperparameters: hyper,
            kernel: Some(KernelSection {
                alpha: model.alpha.clone(),
                support_points: model.support_points.clone(),
                labels: model
                    .labels
                    .iter()
                    .map(|l| if l.is_positive() { 1 } else { -1 })
                    .collect(),
                t_final: model.t_final,
            }),
            linear: None,
            provenance,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Runtime(format!("cannot serialize model: {e}")))?;
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let contents = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: ModelFile = serde_json::from_str(&contents)
            .map_err(|e| CliError::Usage(format!("malformed model file: {e}")))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported model format_version {}",
                file.format_version
            )));
        }
        match (file.model_type, &file.linear, &file.kernel) {
            (ModelType::Linear, Some(_), _) | (ModelType::Kernel, _, Some(_)) => Ok(file),
            _ => Err(CliError::Usage(
                "model file section does not match model_type".into(),
            )),
        }
    }

    /// Decision scores of the stored model on a dataset, in row order.
    pub fn score(&self, dataset: &Dataset) -> Result<Vec<f64>, CliError> {
        match self.model_type {
            ModelType::Linear => {
                let section = self.linear.as_ref().expect("validated at load");
                let model = LinearModel {
                    w: section.weights.clone(),
                    b: self.hyperparameters.bias,
                    lambda: self.hyperparameters.lambda,
                    iterations_run: section.iterations_run,
                    seed: self.hyperparameters.seed,
                };
                Ok(model.decision_scores(dataset)?)
            }
            ModelType::Kernel => {
                let section = self.kernel.as_ref().expect("validated at load");
                let kernel = self.hyperparameters.kernel.ok_or_else(|| {
                    CliError::Usage("kernel model file lacks a kernel spec".into())
                })?;
                let labels = section
                    .labels
                    .iter()
                    .map(|&l| match l {
                        1 => Ok(Label::Positive),
                        -1 => Ok(Label::Negative),
                        other => Err(CliError::Usage(format!(
                            "model label must be 1 or -1, got {other}"
                        ))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let model = KernelModel {
                    alpha: section.alpha.clone(),
                    support_points: section.support_points.clone(),
                    labels,
                    kernel,
                    b: self.hyperparameters.bias,
                    lambda: self.hyperparameters.lambda,
                    t_final: section.t_final,
                    seed: self.hyperparameters.seed,
                };
                Ok(model.decision_scores(dataset)?)
            }
        }
    }
}

pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pegasos_core::{
        train_kernel, train_linear, KernelConfig, LabeledPoint, LinearConfig,
    };

    fn dataset() -> Dataset {
        let mut points = Vec::new();
        for i in 0..8 {
            let x = 0.37 * i as f64 - 1.1;
            points.push(LabeledPoint::new(vec![x, x * x], Label::Positive));
        }
        for i in 0..12 {
            let x = -0.29 * i as f64 + 0.4;
            points.push(LabeledPoint::new(vec![x, -x * x], Label::Negative));
        }
        Dataset::from_points(points).unwrap()
    }

    fn hyper(kernel: Option<KernelSpec>) -> Hyperparameters {
        Hyperparameters {
            lambda: 0.17,
            bias: -0.4,
            iterations: 90,
            check_every: 9,
            seed: 13,
            projection: false,
            kernel,
        }
    }

    fn provenance() -> Provenance {
        Provenance {
            data_path: "test.csv".into(),
            target_column: "class".into(),
            positive_label: "yes".into(),
            timestamp: 0,
        }
    }

    /// Saving and reloading reproduces decision scores bit for bit.
    #[test]
    fn round_trip_preserves_scores_exactly() {
        let ds = dataset();
        let dir = std::env::temp_dir();

        let config = LinearConfig::new(0.17, -0.4, 90, 9, 13);
        let (model, _) = train_linear(&ds, &config).unwrap();
        let direct = model.decision_scores(&ds).unwrap();
        let file = ModelFile::from_linear(&model, hyper(None), provenance());
        let path = dir.join(format!("pegasos-mf-lin-{}.json", std::process::id()));
        file.save(&path).unwrap();
        let reloaded = ModelFile::load(&path).unwrap();
        assert_eq!(reloaded.score(&ds).unwrap(), direct);
        std::fs::remove_file(&path).ok();

        let spec = KernelSpec::Rbf { gamma: 0.8 };
        let config = KernelConfig::new(0.17, spec, -0.4, 90, 9, 13);
        let (model, _) = train_kernel(&ds, &config).unwrap();
        let direct = model.decision_scores(&ds).unwrap();
        let file = ModelFile::from_kernel(&model, hyper(Some(spec)), provenance());
        let path = dir.join(format!("pegasos-mf-ker-{}.json", std::process::id()));
        file.save(&path).unwrap();
        let reloaded = ModelFile::load(&path).unwrap();
        assert_eq!(reloaded.score(&ds).unwrap(), direct);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn load_rejects_mismatched_sections() {
        let ds = dataset();
        let config = LinearConfig::new(0.17, -0.4, 50, 5, 1);
        let (model, _) = train_linear(&ds, &config).unwrap();
        let mut file = ModelFile::from_linear(&model, hyper(None), provenance());
        file.model_type = ModelType::Kernel;
        let path = std::env::temp_dir().join(format!("pegasos-mf-bad-{}.json", std::process::id()));
        file.save(&path).unwrap();
        assert!(ModelFile::load(&path).is_err());
        std::fs::remove_file(&path).ok();
    }
}
