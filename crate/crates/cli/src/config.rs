use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use voa_core::models::ModelDescriptor;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Locality,
    Covariance,
    Reconstruction,
    Unitarity,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Axioms, Suite::Locality, Suite::Covariance, Suite::Reconstruction, Suite::Unitarity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Locality => "locality",
            Suite::Covariance => "covariance",
            Suite::Reconstruction => "reconstruction",
            Suite::Unitarity => "unitarity",
        }
    }

    fn all() -> Vec<Suite> {
        Self::ALL.to_vec()
    }
}

fn default_cutoffs() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}

fn default_tolerance() -> f64 {
    1e-10
}

fn yes() -> bool {
    true
}

/// Everything a run needs. Parsed from JSON with unknown keys rejected;
/// command-line flags override individual fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelDescriptor,
    #[serde(default = "Suite::all")]
    pub suites: Vec<Suite>,
    /// Fourier cutoffs for the decay experiment, ascending.
    #[serde(default = "default_cutoffs")]
    pub cutoffs: Vec<usize>,
    /// Relative tolerance for floating-point identities that are exact in
    /// exact arithmetic.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub json: bool,
    #[serde(default)]
    pub csv: bool,
    /// Write wall-clock timings to a separate file.
    #[serde(default)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(model: ModelDescriptor) -> Self {
        RunConfig {
            model,
            suites: Suite::all(),
            cutoffs: default_cutoffs(),
            tolerance: default_tolerance(),
            out_dir: None,
            json: true,
            csv: false,
            timings: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |s: &str| Err(ConfigError::Invalid(s.into()));
        if self.model.depth == 0 {
            return bad("depth must be at least 1");
        }
        if self.suites.is_empty() {
            return bad("no suites selected");
        }
        if self.cutoffs.is_empty() || self.cutoffs.windows(2).any(|w| w[0] >= w[1]) || self.cutoffs[0] == 0 {
            return bad("cutoffs must be positive and strictly ascending");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be a positive number");
        }
        if !self.json && !self.csv {
            return bad("at least one of json and csv output is required");
        }
        Ok(())
    }

    /// Suites in canonical order without repeats.
    pub fn suite_list(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use voa_core::models::NullVectors;
    use voa_core::Scalar;

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = RunConfig::from_json(r#"{"model": {"model": {"kind": "virasoro", "c": "1/2"}, "depth": 6, "null_vectors": "keep"}}"#).unwrap();
        assert_eq!(cfg.model, ModelDescriptor::virasoro(Scalar::new(1, 2), 6).with_null_vectors(NullVectors::Keep));
        assert_eq!(cfg.suites, Suite::ALL.to_vec());
        let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(RunConfig::from_json(r#"{"model": {"model": {"kind": "heisenberg"}, "depth": 4}, "colour": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model": {"model": {"kind": "heisenberg"}, "depth": 4}, "cutoffs": [8, 4]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model": {"model": {"kind": "heisenberg"}, "depth": 0}}"#).is_err());
    }
}
