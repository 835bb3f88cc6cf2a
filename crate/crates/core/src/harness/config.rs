//! Scenario configuration file.
//!
//! A flat TOML document; every key is optional and falls back to the
//! reference experiment (3 m × 5 m plane, 2-antenna helpers, μ = 3.5,
//! λ = 0.4 m, 20 dB Bob SNR, 17 dB JNNR, 150 steps). Unknown keys are
//! rejected.
//!
//! | key | unit | default |
//! |-----|------|---------|
//! | `plane_width`, `plane_height` | m | 3.0, 5.0 |
//! | `alice`, `bob`, `eve` | m, `[x, y]` | `[1.5, 0.1]`, `[1.5, 4.9]`, `[1.5, 4.1]` |
//! | `helper_count` | – | 1 |
//! | `helper_counts` | – | `[1, 2, 3, 4, 5, 6]` (sweep only) |
//! | `antennas_per_helper` | – | 2 |
//! | `wavelength` | m | 0.4 |
//! | `pathloss_mu` | – | 3.5 |
//! | `correlation_length` | m | `wavelength / 2` |
//! | `bob_snr_db`, `jnnr_db` | dB | 20, 17 |
//! | `rho` | m | smallest disc around the array + 0.05 |
//! | `steps` | – | 150 |
//! | `seeds` | – | `[1, …, 20]` |
//! | `init_center_y` | m | 2.5 |
//! | `init_jitter_gamma` | m | 0.1 |
//! | `step_size` | s | see [`DEFAULT_STEP_SIZE`] |
//! | `fd_step` | m | `wavelength / 1000` |
//! | `max_displacement` | m | `wavelength / 4` |
//! | `collision_weight` | – | 1 |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::default_rho;

pub const DEFAULT_STEP_SIZE: f64 = 1.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plane_width: Option<f64>,
    pub plane_height: Option<f64>,
    pub alice: Option<[f64; 2]>,
    pub bob: Option<[f64; 2]>,
    pub eve: Option<[f64; 2]>,
    pub helper_count: Option<usize>,
    pub helper_counts: Option<Vec<usize>>,
    pub antennas_per_helper: Option<usize>,
    pub wavelength: Option<f64>,
    pub pathloss_mu: Option<f64>,
    pub correlation_length: Option<f64>,
    pub bob_snr_db: Option<f64>,
    pub jnnr_db: Option<f64>,
    pub rho: Option<f64>,
    pub steps: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub init_center_y: Option<f64>,
    pub init_jitter_gamma: Option<f64>,
    pub step_size: Option<f64>,
    pub fd_step: Option<f64>,
    pub max_displacement: Option<f64>,
    pub collision_weight: Option<f64>,
}

/// A configuration with every key filled in and validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub plane_width: f64,
    pub plane_height: f64,
    pub alice: [f64; 2],
    pub bob: [f64; 2],
    pub eve: [f64; 2],
    pub helper_count: usize,
    pub helper_counts: Vec<usize>,
    pub antennas_per_helper: usize,
    pub wavelength: f64,
    pub pathloss_mu: f64,
    pub correlation_length: f64,
    pub bob_snr_db: f64,
    pub jnnr_db: f64,
    pub rho: f64,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub init_center_y: f64,
    pub init_jitter_gamma: f64,
    pub step_size: f64,
    pub fd_step: f64,
    pub max_displacement: f64,
    pub collision_weight: f64,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let wavelength = self.wavelength.unwrap_or(0.4);
        let antennas = self.antennas_per_helper.unwrap_or(2);
        let resolved = ResolvedConfig {
            plane_width: self.plane_width.unwrap_or(3.0),
            plane_height: self.plane_height.unwrap_or(5.0),
            alice: self.alice.unwrap_or([1.5, 0.1]),
            bob: self.bob.unwrap_or([1.5, 4.9]),
            eve: self.eve.unwrap_or([1.5, 4.1]),
            helper_count: self.helper_count.unwrap_or(1),
            helper_counts: self
                .helper_counts
                .clone()
                .unwrap_or_else(|| (1..=6).collect()),
            antennas_per_helper: antennas,
            wavelength,
            pathloss_mu: self.pathloss_mu.unwrap_or(3.5),
            correlation_length: self.correlation_length.unwrap_or(wavelength / 2.0),
            bob_snr_db: self.bob_snr_db.unwrap_or(20.0),
            jnnr_db: self.jnnr_db.unwrap_or(17.0),
            rho: self
                .rho
                .unwrap_or_else(|| default_rho(antennas, wavelength)),
            steps: self.steps.unwrap_or(150),
            seeds: self.seeds.clone().unwrap_or_else(|| (1..=20).collect()),
            init_center_y: self.init_center_y.unwrap_or(2.5),
            init_jitter_gamma: self.init_jitter_gamma.unwrap_or(0.1),
            step_size: self.step_size.unwrap_or(DEFAULT_STEP_SIZE),
            fd_step: self.fd_step.unwrap_or(wavelength / 1000.0),
            max_displacement: self.max_displacement.unwrap_or(wavelength / 4.0),
            collision_weight: self.collision_weight.unwrap_or(1.0),
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

impl ResolvedConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("plane_width", self.plane_width),
            ("plane_height", self.plane_height),
            ("wavelength", self.wavelength),
            ("pathloss_mu", self.pathloss_mu),
            ("correlation_length", self.correlation_length),
            ("rho", self.rho),
            ("init_jitter_gamma", self.init_jitter_gamma),
            ("step_size", self.step_size),
            ("fd_step", self.fd_step),
            ("max_displacement", self.max_displacement),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("bob_snr_db", self.bob_snr_db),
            ("jnnr_db", self.jnnr_db),
            ("init_center_y", self.init_center_y),
            ("collision_weight", self.collision_weight),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if self.collision_weight < 0.0 {
            return Err(Error::Config(
                "collision_weight must be non-negative".into(),
            ));
        }
        if self.init_jitter_gamma >= 0.5 {
            return Err(Error::Config(format!(
                "init_jitter_gamma must be well below 1 m (< 0.5), got {}",
                self.init_jitter_gamma
            )));
        }
        if self.helper_count == 0 {
            return Err(Error::Config("helper_count must be at least 1".into()));
        }
        if self.helper_counts.is_empty() || self.helper_counts.contains(&0) {
            return Err(Error::Config(
                "helper_counts must be a non-empty list of positive counts".into(),
            ));
        }
        if self.antennas_per_helper < 2 {
            return Err(Error::Config(
                "antennas_per_helper must be at least 2".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        for (name, p) in [("alice", self.alice), ("bob", self.bob), ("eve", self.eve)] {
            if !(0.0..=self.plane_width).contains(&p[0])
                || !(0.0..=self.plane_height).contains(&p[1])
            {
                return Err(Error::Config(format!(
                    "{name} at {p:?} lies outside the plane"
                )));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let parsed: ResolvedConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        parsed.validate()?;
        Ok(parsed)
    }

    /// Same configuration with a different helper count.
    pub fn with_helper_count(&self, helper_count: usize) -> Self {
        Self {
            helper_count,
            ..self.clone()
        }
    }
}
