//! Optional JSON config document; command-line flags override its values.

use std::path::{Path, PathBuf};

use freeconv::rmt::ExperimentConfig;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Truncation order `K` for `convolve`.
    pub order: usize,
    pub density: bool,
    pub epsilon: f64,
    pub richardson: bool,
    pub grid_points: usize,
    pub out: PathBuf,
    pub quantile_atoms: usize,
    pub experiment: ExperimentConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            order: 8,
            density: false,
            epsilon: 1e-3,
            richardson: false,
            grid_points: 2000,
            out: PathBuf::from("out"),
            quantile_atoms: 64,
            experiment: ExperimentConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_documents_and_unknown_keys() {
        let c: Config = serde_json::from_str(r#"{"order": 5, "experiment": {"size": 300}}"#).unwrap();
        assert_eq!(c.order, 5);
        assert_eq!(c.experiment.size, 300);
        assert_eq!(c.grid_points, 2000);
        assert!(serde_json::from_str::<Config>(r#"{"orders": 5}"#).is_err());
        assert!(serde_json::from_str::<Config>(r#"{"experiment": {"sise": 5}}"#).is_err());
    }
}
