use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dist::{ModelParams, Pmf, ThresholdQ};
use crate::sim::SimConfig;
use crate::Error;

/// Contents of a `--config` file.
///
/// ```json
/// {
///   "p": [[1, 0.5], [3, 0.5]],
///   "q": [[2, 1.0]],
///   "theta": "0.3",
///   "sim": { "depth": 30, "replicates": 10000, "seed": 7 },
///   "grid": ["0.05", "0.1", "1/3"]
/// }
/// ```
///
/// `theta` and grid entries are decimal or `n/d` strings and are kept exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: Vec<(usize, f64)>,
    pub q: Vec<(usize, f64)>,
    pub theta: ThresholdQ,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<ThresholdQ>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Model(Error::ConfigInvalid(e.to_string())))
    }

    pub fn params(&self) -> crate::Result<ModelParams> {
        ModelParams::new(
            Pmf::from_pairs(self.p.iter().copied())?,
            Pmf::from_pairs(self.q.iter().copied())?,
            self.theta,
        )
    }
}

/// Parses a comma-separated list of thresholds.
pub fn parse_grid(text: &str) -> crate::Result<Vec<ThresholdQ>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}
