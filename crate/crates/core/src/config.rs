//! Run-time defaults, overridable by a JSON file and then by flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::critical::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::grassmann::{SearchParams, DEFAULT_CLUSTER_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub search: SearchParams,
    /// Criticality tolerance on the first-cousin residual.
    pub tol: f64,
    pub cluster_tol: f64,
    /// Seed for the random spinor.
    pub seed: u64,
    /// Frames whose orthonormality defect exceeds this are reported before
    /// being re-orthonormalized.
    pub frame_warn_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            search: SearchParams::default(),
            tol: DEFAULT_TOL,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            seed: 0,
            frame_warn_tol: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.search.validate()?;
        for (name, v) in [
            ("tol", self.tol),
            ("cluster_tol", self.cluster_tol),
            ("frame_warn_tol", self.frame_warn_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
