//! Experiment configuration: one JSON document per experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::core::LabeledSample;
use crate::data::{generate_synthetic, load_csv, DatasetSpec, SyntheticDriftSpec};
use crate::error::{Error, Result};
use crate::stream::{ExperimentPlan, OfflineConfig, StrategyConfig};

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetSource {
    Csv { path: PathBuf, spec: DatasetSpec },
    Synthetic { spec: SyntheticDriftSpec },
}

impl DatasetSource {
    pub fn id(&self) -> String {
        match self {
            Self::Csv { spec, .. } => spec.name.clone(),
            Self::Synthetic { spec } => format!("synthetic-{:?}", spec.kind).to_lowercase(),
        }
    }

    pub fn load(&self) -> Result<Vec<LabeledSample>> {
        match self {
            Self::Csv { path, spec } => load_csv(path, spec),
            Self::Synthetic { spec } => generate_synthetic(spec),
        }
    }
}

/// Everything one experiment needs: data, strategies, budgets, protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub strategies: Vec<StrategyConfig>,
    pub budgets: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub plan: ExperimentPlan,
    #[serde(default)]
    pub offline: OfflineConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies configured".into()));
        }
        let mut names: Vec<&str> = self.strategies.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.strategies.len() {
            return Err(Error::Config("strategy names must be unique".into()));
        }
        if self.budgets.is_empty() {
            return Err(Error::Config("no budgets configured".into()));
        }
        for &b in &self.budgets {
            if !(0.0..1.0).contains(&b) || b == 0.0 {
                return Err(Error::Config(format!("budget {b} outside (0,1)")));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.plan.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DriftKind;
    use crate::stream::{ManagerKind, UtilityKind};

    fn minimal() -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetSource::Synthetic {
                spec: SyntheticDriftSpec {
                    kind: DriftKind::Abrupt,
                    length: 2200,
                    dimension: 2,
                    drift_position: 1100,
                    drift_width: 0,
                    noise_scale: 0.1,
                    seed: 1,
                },
            },
            strategies: vec![StrategyConfig {
                name: "random".into(),
                utility: UtilityKind::Random,
                manager: ManagerKind::Random { window: 256 },
                models: Default::default(),
                rvc_regressor_classes: None,
                inverse_mode: Default::default(),
            }],
            budgets: vec![0.1],
            trials: 1,
            seed: 0,
            plan: Default::default(),
            offline: Default::default(),
            output_dir: PathBuf::from("out"),
        }
    }

    #[test]
    fn minimal_config_validates() {
        minimal().validate().unwrap();
    }

    #[test]
    fn bad_budget_rejected() {
        let mut c = minimal();
        c.budgets = vec![1.5];
        assert!(c.validate().is_err());
    }

    #[test]
    fn duplicate_strategy_names_rejected() {
        let mut c = minimal();
        c.strategies.push(c.strategies[0].clone());
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_round_trips() {
        let c = minimal();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }
}
