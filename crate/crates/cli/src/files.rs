//! On-disk formats: the configuration file read by every command and the
//! report written by every command.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use pupil_cover::geom::{ConfigError, Pupil, PupilConfig};
use pupil_cover::optimize::OptimizerConfig;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("objective_center: the objective must be centered at the origin, got ({0}, {1})")]
    ObjectiveCenter(f64, f64),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PupilEntry {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub objective_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_center: Option<[f64; 2]>,
    pub pupils: Vec<PupilEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptimizerConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), InputError> {
        let bytes = std::fs::read(path).map_err(|source| InputError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let text = String::from_utf8_lossy(&bytes);
        Ok((Self::parse(&text)?, bytes))
    }

    pub fn from_config(cfg: &PupilConfig) -> Self {
        Self {
            objective_radius: cfg.objective_radius(),
            objective_center: None,
            pupils: cfg
                .pupils()
                .iter()
                .map(|p| PupilEntry {
                    x: p.center.x,
                    y: p.center.y,
                    r: p.radius,
                })
                .collect(),
            options: None,
        }
    }

    pub fn to_config(&self) -> Result<PupilConfig, InputError> {
        if let Some([x, y]) = self.objective_center {
            if x != 0.0 || y != 0.0 {
                return Err(InputError::ObjectiveCenter(x, y));
            }
        }
        let pupils = self
            .pupils
            .iter()
            .map(|p| Pupil::at(p.x, p.y, p.r))
            .collect();
        PupilConfig::new(pupils, self.objective_radius).map_err(|e| {
            InputError::Invalid(match e {
                ConfigError::NoPupils => "pupils: at least one pupil is required".to_string(),
                ConfigError::ObjectiveRadius(r) => {
                    format!("objective_radius: must be finite and positive, got {r}")
                }
                ConfigError::NonFiniteCenter { index } => {
                    format!("pupils[{index}]: center coordinates must be finite")
                }
                ConfigError::InvalidRadius { index, radius } => {
                    format!(
                        "pupils[{index}].r: radius must be finite and non-negative, got {radius}"
                    )
                }
            })
        })
    }

    pub fn options(&self) -> OptimizerConfig {
        self.options.clone().unwrap_or_default()
    }
}

/// Hex SHA-256 of the command's input.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input_digest: String,
    pub result: serde_json::Value,
    pub runtime_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let text = r#"{"objective_radius": 1.0, "pupils": [{"x": 0.1, "y": -0.30000000000000004, "r": 0.123456789012345678}]}"#;
        let parsed = ConfigFile::parse(text).unwrap();
        let cfg = parsed.to_config().unwrap();
        let again =
            ConfigFile::parse(&serde_json::to_string(&ConfigFile::from_config(&cfg)).unwrap())
                .unwrap();
        assert_eq!(again.to_config().unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_and_off_center_objectives_are_rejected() {
        assert!(ConfigFile::parse(r#"{"objective_radius": 1, "pupils": [], "extra": 1}"#).is_err());
        let off = ConfigFile::parse(r#"{"objective_radius": 1, "objective_center": [0.5, 0], "pupils": [{"x":0,"y":0,"r":0.1}]}"#)
            .unwrap();
        assert!(matches!(
            off.to_config(),
            Err(InputError::ObjectiveCenter(..))
        ));
    }

    #[test]
    fn bad_radius_names_the_field() {
        let cfg = ConfigFile::parse(
            r#"{"objective_radius": 1, "pupils": [{"x":0,"y":0,"r":0.1},{"x":1,"y":0,"r":-0.2}]}"#,
        )
        .unwrap();
        let msg = cfg.to_config().unwrap_err().to_string();
        assert!(msg.starts_with("pupils[1].r"), "{msg}");
    }
}
