//! Run configuration: a JSON document naming the model, the sampling sizes,
//! the master seed, and the verification checks to run. Unknown keys are
//! rejected and the canonical form round-trips through serde.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::models::ModelSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Checks run by the `verify` subcommand; empty means the model's
    /// default suite.
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n < 2 {
            return Err(Error::Config(format!("n must be >= 2, got {}", self.n)));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        Ok(())
    }

    /// A small deterministic default: i.i.d. Fréchet(1) at desk scale.
    pub fn default_frechet() -> Self {
        RunConfig {
            model: ModelSpec::Iid { law: crate::models::TailLaw::Frechet { alpha: 1.0 } },
            n: 10_000,
            reps: 2000,
            seed: 1,
            output_dir: default_output_dir(),
            checks: Vec::new(),
        }
    }
}

/// One verification check, with optional per-check size overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub check: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckKind {
    EndpointLimit,
    Fdd { times: Vec<f64>, levels_grid: Vec<Vec<f64>> },
    Tightness { delta_grid: Vec<f64>, eps: f64, u: f64 },
    TruncationGap { u_grid: Vec<f64>, eps: f64 },
    ExceedanceCounts { u: f64 },
    ImpliedTail { x_grid: Vec<f64> },
}
