//! The RLT artifact: a run's configuration, per-experiment RLT rows and
//! their mean, as canonical JSON.
//!
//! Keys are emitted in a fixed order and floats in shortest round-trip
//! form, so identical runs produce identical bytes. Unknown keys are ignored
//! on load; a different `format_version` is rejected.

use std::path::Path;

use gscore_core::{Gamma, RltMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance when checking a stored mean against its rows.
pub const MRLT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactConfig {
    pub experiments: usize,
    /// Resolved coefficient.
    pub gamma: f64,
    /// `"auto"` or `"fixed"`.
    pub gamma_mode: String,
    pub i_max: usize,
    pub landmarks: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean_experiment_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RltArtifact {
    pub config: ArtifactConfig,
    pub dataset_fingerprint: String,
    pub degenerate_experiments: usize,
    pub format_version: u32,
    pub mrlt: Vec<f64>,
    pub overflow_mass: f64,
    pub rlt: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RltArtifact {
    pub fn from_matrix(matrix: &RltMatrix, gamma: Gamma, with_timing: bool) -> Self {
        let mean = matrix.mean();
        Self {
            config: ArtifactConfig {
                experiments: matrix.config.n,
                gamma: matrix.config.gamma,
                gamma_mode: match gamma {
                    Gamma::Auto => "auto".into(),
                    Gamma::Fixed(_) => "fixed".into(),
                },
                i_max: matrix.config.i_max,
                landmarks: matrix.config.l0,
                seed: matrix.config.seed,
            },
            dataset_fingerprint: matrix.dataset_fingerprint.clone(),
            degenerate_experiments: matrix.degenerate_experiments,
            format_version: FORMAT_VERSION,
            mrlt: mean.values,
            overflow_mass: mean.overflow,
            rlt: matrix.rows.iter().map(|r| r.values.clone()).collect(),
            timing: with_timing.then_some(Timing {
                mean_experiment_ms: matrix.mean_experiment_ms,
            }),
        }
    }

    /// Compact JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| format!("not valid JSON: {e}"))?;
        match probe.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => {
                return Err(format!(
                    "unsupported format_version {v} (this build reads {FORMAT_VERSION})"
                ))
            }
            None => return Err("missing format_version".into()),
        }
        let artifact: RltArtifact =
            serde_json::from_value(probe).map_err(|e| format!("malformed artifact: {e}"))?;
        artifact.check()?;
        Ok(artifact)
    }

    /// Shape checks, and the stored mean against a recomputed one.
    pub fn check(&self) -> Result<(), String> {
        let i_max = self.config.i_max;
        if self.mrlt.len() != i_max {
            return Err(format!("mrlt has {} entries, i_max is {i_max}", self.mrlt.len()));
        }
        if self.rlt.is_empty() {
            return Err("rlt has no rows".into());
        }
        if let Some(k) = self.rlt.iter().position(|r| r.len() != i_max) {
            return Err(format!("rlt row {k} does not have {i_max} entries"));
        }
        let n = self.rlt.len() as f64;
        for i in 0..i_max {
            let mean = self.rlt.iter().map(|r| r[i]).sum::<f64>() / n;
            if (mean - self.mrlt[i]).abs() > MRLT_TOLERANCE {
                return Err(format!(
                    "mrlt[{i}] = {} but the rlt rows average to {mean}",
                    self.mrlt[i]
                ));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RltArtifact {
        RltArtifact {
            config: ArtifactConfig {
                experiments: 2,
                gamma: 0.125,
                gamma_mode: "fixed".into(),
                i_max: 3,
                landmarks: 32,
                seed: 1,
            },
            dataset_fingerprint: "ab".into(),
            degenerate_experiments: 0,
            format_version: FORMAT_VERSION,
            mrlt: vec![0.25, 0.75, 0.0],
            overflow_mass: 0.0,
            rlt: vec![vec![0.5, 0.5, 0.0], vec![0.0, 1.0, 0.0]],
            timing: None,
        }
    }

    #[test]
    fn keys_are_in_canonical_order() {
        let json = sample().to_json();
        assert!(json.starts_with(r#"{"config":{"experiments":2,"gamma":0.125,"gamma_mode":"fixed","i_max":3,"landmarks":32,"seed":1},"dataset_fingerprint""#));
        assert!(!json.contains("timing"));
        assert_eq!(RltArtifact::from_json(&json).unwrap(), sample());
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["comment"] = "hello".into();
        assert_eq!(RltArtifact::from_json(&v.to_string()).unwrap(), sample());
    }

    #[test]
    fn rejects_bad_versions_and_means() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["format_version"] = 2.into();
        assert!(RltArtifact::from_json(&v.to_string()).unwrap_err().contains("format_version"));
        v.as_object_mut().unwrap().remove("format_version");
        assert!(RltArtifact::from_json(&v.to_string()).is_err());

        let mut bad = sample();
        bad.mrlt[0] = 0.3;
        assert!(RltArtifact::from_json(&bad.to_json()).unwrap_err().contains("average"));
        let mut ragged = sample();
        ragged.rlt[1].pop();
        assert!(RltArtifact::from_json(&ragged.to_json()).is_err());
        assert!(RltArtifact::from_json("{").is_err());
    }
}
