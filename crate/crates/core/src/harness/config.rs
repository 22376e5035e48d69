use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::harmonics::GroupSpec;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MMULT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "mmult-out";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    #[default]
    Torus,
    Cyclic,
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" | "T" => Ok(GroupKind::Torus),
            "cyclic" | "Z" => Ok(GroupKind::Cyclic),
            other => Err(Error::InvalidArgument(format!("unknown group kind `{other}` (torus|cyclic)"))),
        }
    }
}

/// Everything that determines a run. Unset optional fields take
/// per-command defaults, which are echoed back resolved in the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub group: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<usize>,
    /// Analytic degree of Hardy samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Inner sample count per trial (hardylast-norm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Support size of random tables, or the cutoff of `1/j` in hardy-ineq.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Bracket cap for equiv-report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<String>,
    /// A path to a table document, or the document inline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExperimentConfig {
            command: command.into(),
            group: GroupKind::Torus,
            depth: None,
            n: None,
            channels: None,
            degree: None,
            trials: None,
            samples: None,
            support: None,
            seed: 0,
            tol: None,
            budget: None,
            cap: None,
            equivalence: None,
            table: None,
            out: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn group_spec(&self, default_n: usize, default_depth: usize) -> Result<GroupSpec> {
        let n = self.n.unwrap_or(default_n);
        let depth = self.depth.unwrap_or(default_depth);
        match self.group {
            GroupKind::Torus => GroupSpec::torus(n, depth),
            GroupKind::Cyclic => GroupSpec::cyclic(n, depth),
        }
    }

    /// `--out`, then the environment, then [`DEFAULT_OUT_DIR`].
    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}
