//! Pipeline configuration: JSON file with flag overrides, plus the
//! resolved training settings persisted inside model files.

use std::path::{Path, PathBuf};

use emogan_core::gan::TrainConfig;
use emogan_core::mathkit::AdamParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Concrete per-network training settings, as persisted in model files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSettings {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl TrainSettings {
    pub fn generator_defaults() -> TrainSettings {
        TrainSettings {
            epochs: 10,
            lr: 1e-3,
            batch_size: 16,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn discriminator_defaults() -> TrainSettings {
        TrainSettings {
            epochs: 50,
            ..TrainSettings::generator_defaults()
        }
    }

    pub fn to_train_config(
        self,
        seed: u64,
        split_fraction: f64,
        finetune_rounds: usize,
    ) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            split_fraction,
            finetune_rounds,
            adam: AdamParams {
                lr: self.lr,
                beta1: self.beta1,
                beta2: self.beta2,
                eps: self.eps,
            },
        }
    }
}

/// Partial per-network settings as they appear in a config file; unset
/// fields fall back to the role defaults.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOverrides {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub batch_size: Option<usize>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub eps: Option<f64>,
}

impl TrainOverrides {
    pub fn resolve(&self, defaults: TrainSettings) -> TrainSettings {
        TrainSettings {
            epochs: self.epochs.unwrap_or(defaults.epochs),
            lr: self.lr.unwrap_or(defaults.lr),
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            beta1: self.beta1.unwrap_or(defaults.beta1),
            beta2: self.beta2.unwrap_or(defaults.beta2),
            eps: self.eps.unwrap_or(defaults.eps),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollisionSection {
    pub k: usize,
    pub tau: f64,
}

impl Default for CollisionSection {
    fn default() -> Self {
        CollisionSection { k: 2, tau: 0.995 }
    }
}

/// Embedding source for vectorization.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EmbedderConfig {
    /// Deterministic hash-based stand-in; dimension and seed come from
    /// the pipeline `dim` and `seed`.
    #[default]
    Stub,
    /// Precomputed embeddings, JSON-lines of `{"text", "embedding"}`.
    File { path: PathBuf },
}

/// Whole-pipeline configuration. Every field has a default except the
/// input paths and the seed, which must come from the file or a flag.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub dictionary: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub embedder: EmbedderConfig,
    pub keep_zero_label: bool,
    pub collision: CollisionSection,
    pub generator: TrainOverrides,
    pub discriminator: TrainOverrides,
    pub split_fraction: Option<f64>,
    pub finetune_rounds: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn dim(&self) -> usize {
        self.dim.unwrap_or(512)
    }

    pub fn split_fraction(&self) -> f64 {
        self.split_fraction.unwrap_or(0.7)
    }

    pub fn finetune_rounds(&self) -> usize {
        self.finetune_rounds.unwrap_or(0)
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage("a seed is required (config \"seed\" or --seed)".into()))
    }

    pub fn require_path(&self, field: &str, value: &Option<PathBuf>) -> Result<PathBuf> {
        value
            .clone()
            .ok_or_else(|| CliError::Usage(format!("missing {field} (config or flag)")))
    }
}
