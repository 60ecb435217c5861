//! Sweep and threshold configuration, read from TOML key-value files.
//!
//! ```toml
//! scenario = "squeezed_noise"
//! source_db = [-2.95, 4.15]   # squeezed / antisqueezed noise levels, dB
//! fixed_loss = 0.4            # channel loss held fixed by noise sweeps
//!
//! [grid]
//! start = 0.0
//! stop = 5.0
//! points = 41
//!
//! [sampling]                  # optional: run the homodyne round trip too
//! n = 500000
//! seed = 7
//! ```
//!
//! All numeric inputs are in shot-noise units except the dB-labeled source
//! levels; losses are L in [0, 1].

use std::path::Path;

use gqc_core::GaussianState;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default source: -2.95 dB squeezing, 4.15 dB antisqueezing.
pub const DEFAULT_SOURCE_DB: (f64, f64) = (-2.95, 4.15);

/// Default loss held fixed by noise sweeps.
pub const DEFAULT_FIXED_LOSS: f64 = 0.4;

/// Which state is sent through which channel topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Squeezed state, lossy channel swept over L.
    SqueezedLoss,
    /// EPR state, one mode through a lossy channel swept over L.
    EprLoss,
    /// Squeezed state, noisy channel at fixed loss swept over delta.
    SqueezedNoise,
    /// EPR state, one mode through a noisy channel swept over delta.
    EprNoiseOneMode,
    /// EPR state, both modes through identical noisy channels swept over delta.
    EprNoiseTwoModes,
    /// EPR state, both modes through identical lossy channels swept over L.
    EprLossTwoModes,
}

impl Scenario {
    /// Name of the swept parameter, used as the first CSV column.
    pub fn parameter_name(self) -> &'static str {
        match self {
            Scenario::SqueezedLoss | Scenario::EprLoss | Scenario::EprLossTwoModes => "loss",
            Scenario::SqueezedNoise | Scenario::EprNoiseOneMode | Scenario::EprNoiseTwoModes => {
                "excess_noise"
            }
        }
    }

    pub fn sweeps_loss(self) -> bool {
        matches!(
            self,
            Scenario::SqueezedLoss | Scenario::EprLoss | Scenario::EprLossTwoModes
        )
    }

    pub fn n_modes(self) -> usize {
        match self {
            Scenario::SqueezedLoss | Scenario::SqueezedNoise => 1,
            _ => 2,
        }
    }
}

/// Evenly spaced sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + i as f64 * step
                }
            })
            .collect()
    }
}

/// Optional homodyne round trip per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Samples per acquisition.
    pub n: usize,
    /// Base seed; grid point `i` uses `seed ^ i`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    #[serde(default = "default_source")]
    pub source_db: (f64, f64),
    #[serde(default = "default_fixed_loss")]
    pub fixed_loss: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub sampling: Option<SamplingConfig>,
    /// Boundary metric for threshold searches; defaults by scenario.
    #[serde(default)]
    pub metric: Option<crate::threshold::ThresholdMetric>,
}

fn default_source() -> (f64, f64) {
    DEFAULT_SOURCE_DB
}

fn default_fixed_loss() -> f64 {
    DEFAULT_FIXED_LOSS
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SweepConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.points < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {}",
                self.grid.points
            )));
        }
        if !(self.grid.start < self.grid.stop) {
            return Err(Error::Config(format!(
                "grid must be increasing, got start {} stop {}",
                self.grid.start, self.grid.stop
            )));
        }
        if self.sweeps_loss() {
            if self.grid.start < 0.0 || self.grid.stop > 1.0 {
                return Err(Error::Config(format!(
                    "loss grid must stay within [0, 1], got [{}, {}]",
                    self.grid.start, self.grid.stop
                )));
            }
        } else {
            if self.grid.start < 0.0 {
                return Err(Error::Config(format!(
                    "excess noise cannot be negative, got start {}",
                    self.grid.start
                )));
            }
            if !(0.0..=1.0).contains(&self.fixed_loss) {
                return Err(Error::Config(format!(
                    "fixed_loss must lie in [0, 1], got {}",
                    self.fixed_loss
                )));
            }
        }
        if let Some(sampling) = &self.sampling {
            if sampling.n < 200 {
                return Err(Error::Config(format!(
                    "sampling.n must be at least 200 so block error bars exist, got {}",
                    sampling.n
                )));
            }
        }
        // Source variances must describe a physical state.
        self.source_state()?;
        Ok(())
    }

    pub fn sweeps_loss(&self) -> bool {
        self.scenario.sweeps_loss()
    }

    /// Build the source state from its dB levels.
    pub fn source_state(&self) -> Result<GaussianState> {
        let v_s = gqc_core::state::db_to_variance(self.source_db.0);
        let v_as = gqc_core::state::db_to_variance(self.source_db.1);
        let state = match self.scenario.n_modes() {
            1 => GaussianState::squeezed(v_s, v_as)?,
            _ => GaussianState::epr(v_s, v_as)?,
        };
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let config = SweepConfig::from_toml_str(
            "scenario = \"squeezed_noise\"\n[grid]\nstart = 0.0\nstop = 5.0\npoints = 41\n",
        )
        .unwrap();
        assert_eq!(config.scenario, Scenario::SqueezedNoise);
        assert_eq!(config.source_db, DEFAULT_SOURCE_DB);
        assert_eq!(config.fixed_loss, DEFAULT_FIXED_LOSS);
        assert!(config.sampling.is_none());
        assert_eq!(config.grid.values().len(), 41);
    }

    #[test]
    fn parses_full_config() {
        let config = SweepConfig::from_toml_str(concat!(
            "scenario = \"epr_noise_two_modes\"\n",
            "source_db = [-3.0, 5.0]\n",
            "fixed_loss = 0.25\n",
            "metric = \"ppt_crosses_one\"\n",
            "[grid]\nstart = 0.0\nstop = 2.0\npoints = 5\n",
            "[sampling]\nn = 1000\nseed = 7\n",
        ))
        .unwrap();
        assert_eq!(config.scenario.n_modes(), 2);
        assert_eq!(config.sampling.unwrap().seed, 7);
        assert_eq!(config.grid.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn rejects_bad_configs() {
        // Decreasing grid.
        assert!(SweepConfig::from_toml_str(
            "scenario = \"squeezed_loss\"\n[grid]\nstart = 1.0\nstop = 0.0\npoints = 3\n"
        )
        .is_err());
        // Loss outside [0, 1].
        assert!(SweepConfig::from_toml_str(
            "scenario = \"squeezed_loss\"\n[grid]\nstart = 0.0\nstop = 1.5\npoints = 3\n"
        )
        .is_err());
        // Single point.
        assert!(SweepConfig::from_toml_str(
            "scenario = \"squeezed_loss\"\n[grid]\nstart = 0.0\nstop = 1.0\npoints = 1\n"
        )
        .is_err());
        // Unphysical source.
        assert!(SweepConfig::from_toml_str(concat!(
            "scenario = \"squeezed_loss\"\n",
            "source_db = [-3.0, 1.0]\n",
            "[grid]\nstart = 0.0\nstop = 1.0\npoints = 3\n"
        ))
        .is_err());
        // Unknown keys are configuration mistakes, not extensions.
        assert!(SweepConfig::from_toml_str(concat!(
            "scenario = \"squeezed_loss\"\nlose = 1\n",
            "[grid]\nstart = 0.0\nstop = 1.0\npoints = 3\n"
        ))
        .is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let grid = GridSpec {
            start: 0.0,
            stop: 1.0,
            points: 41,
        };
        let values = grid.values();
        assert_eq!(values[0], 0.0);
        assert_eq!(values[40], 1.0);
        assert_eq!(values.len(), 41);
    }
}
