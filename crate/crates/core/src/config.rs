//! Scenario configuration and its TOML file form.
//!
//! File fields carry their units in the name (`theta_deg`, `bandwidth_gbps`,
//! `length_m`). Angles are converted to radians and gigabytes to bytes
//! (10^9) on load; everything downstream works in SI units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LidarSpec, RoadGeometry, WidthRule};
use crate::solver::{BinaryTransfer, SwarmConfig};
use crate::BYTES_PER_GB;

/// Scenario that reproduces the initial model run parameters.
pub const TABLE1_TOML: &str = include_str!("../scenarios/table1.toml");
/// Fixed-placement comparison: depth 9 and a 3.6 GB/s throughput cap.
pub const SPARSE_TOML: &str = include_str!("../scenarios/sparse.toml");

/// Network and safety limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Aggregate throughput cap, bytes per second.
    pub bandwidth: f64,
    /// Per-unit energy cap, W.
    pub energy: f64,
}

/// Static exterior penalty weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub throughput: f64,
    pub energy: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights {
            throughput: 1.0,
            energy: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub lidar: LidarSpec,
    pub road: RoadGeometry,
    pub limits: Limits,
    /// Cost per placed unit.
    pub lambda: f64,
    /// Fraction of the roadway that must be covered.
    pub eta: f64,
    pub num_elids: usize,
    pub penalty: PenaltyWeights,
    pub width_rule: WidthRule,
    /// Angular step in radians. Accepted for completeness; no formula uses it.
    pub angle_step: f64,
    /// Length step in meters. Accepted for completeness; no formula uses it.
    pub length_step: f64,
    pub swarm: SwarmConfig,
}

impl ScenarioConfig {
    pub fn table1() -> Self {
        Self::from_toml_str(TABLE1_TOML).expect("bundled table1 scenario is valid")
    }

    pub fn sparse() -> Self {
        Self::from_toml_str(SPARSE_TOML).expect("bundled sparse scenario is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ScenarioFile = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        file.into_config()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<inline>".into(),
            message: e.to_string(),
        })?;
        file.into_config()
    }

    pub fn validate(&self) -> Result<()> {
        self.lidar.validate()?;
        self.road.validate()?;
        if self.num_elids == 0 {
            return Err(Error::Config("at least one candidate unit is required".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.limits.bandwidth >= 0.0 && self.limits.energy >= 0.0) {
            return Err(Error::Config("limits must be non-negative".into()));
        }
        if !(self.penalty.throughput >= 0.0 && self.penalty.energy >= 0.0) {
            return Err(Error::Config("penalty weights must be non-negative".into()));
        }
        // Steepest tilt happens at the lowest mount.
        let omega_max = (self.road.y_min / self.road.z_min).atan();
        if omega_max + self.lidar.phi >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::Config(format!(
                "z_min = {} m tilts the scan past the horizon (omega {:.2} deg + phi {:.2} deg >= 90 deg)",
                self.road.z_min,
                omega_max.to_degrees(),
                self.lidar.phi.to_degrees()
            )));
        }
        self.swarm.validate()
    }

    /// Writes the scenario back in file form.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(&ScenarioFile::from_config(self)).expect("scenario serializes")
    }
}

/// On-disk schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub lidar: LidarSection,
    pub road: RoadSection,
    pub limits: LimitsSection,
    pub model: ModelSection,
    pub swarm: SwarmSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LidarSection {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub scan_rate_hz: f64,
    pub detection_height_m: f64,
    pub comm_power_w: f64,
    pub scan_power_w: f64,
    pub upload_rate_gbps: f64,
    pub octree_depth: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadSection {
    pub length_m: f64,
    pub y_min_m: f64,
    pub y_max_m: f64,
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub sector_ends_m: Vec<f64>,
    pub sector_scores: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    pub bandwidth_gbps: f64,
    pub energy_w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: f64,
    pub eta: f64,
    pub num_elids: usize,
    #[serde(default = "one")]
    pub throughput_penalty: f64,
    #[serde(default = "one")]
    pub energy_penalty: f64,
    #[serde(default)]
    pub width_rule: WidthRule,
    #[serde(default = "tenth")]
    pub angle_step_deg: f64,
    #[serde(default = "tenth")]
    pub length_step_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmSection {
    pub num_particles: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub max_iterations: usize,
    pub improvement_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_window: Option<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_clamp: Option<f64>,
    #[serde(default)]
    pub binary_transfer: BinaryTransfer,
}

fn one() -> f64 {
    1.0
}

fn tenth() -> f64 {
    0.1
}

impl ScenarioFile {
    pub fn into_config(self) -> Result<ScenarioConfig> {
        let config = ScenarioConfig {
            lidar: LidarSpec {
                theta: self.lidar.theta_deg.to_radians(),
                phi: self.lidar.phi_deg.to_radians(),
                scan_rate: self.lidar.scan_rate_hz,
                detection_height: self.lidar.detection_height_m,
                comm_power: self.lidar.comm_power_w,
                scan_power: self.lidar.scan_power_w,
                upload_rate: self.lidar.upload_rate_gbps * BYTES_PER_GB,
                octree_depth: self.lidar.octree_depth,
            },
            road: RoadGeometry {
                length: self.road.length_m,
                y_min: self.road.y_min_m,
                y_max: self.road.y_max_m,
                z_min: self.road.z_min_m,
                z_max: self.road.z_max_m,
                sector_ends: self.road.sector_ends_m,
                sector_scores: self.road.sector_scores,
            },
            limits: Limits {
                bandwidth: self.limits.bandwidth_gbps * BYTES_PER_GB,
                energy: self.limits.energy_w,
            },
            lambda: self.model.lambda,
            eta: self.model.eta,
            num_elids: self.model.num_elids,
            penalty: PenaltyWeights {
                throughput: self.model.throughput_penalty,
                energy: self.model.energy_penalty,
            },
            width_rule: self.model.width_rule,
            angle_step: self.model.angle_step_deg.to_radians(),
            length_step: self.model.length_step_m,
            swarm: SwarmConfig {
                num_particles: self.swarm.num_particles,
                inertia: self.swarm.inertia,
                cognitive: self.swarm.cognitive,
                social: self.swarm.social,
                max_iterations: self.swarm.max_iterations,
                improvement_tol: self.swarm.improvement_tol,
                stall_window: self.swarm.stall_window,
                seed: self.swarm.seed,
                velocity_clamp: self.swarm.velocity_clamp,
                transfer: self.swarm.binary_transfer,
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_config(c: &ScenarioConfig) -> Self {
        ScenarioFile {
            lidar: LidarSection {
                theta_deg: c.lidar.theta.to_degrees(),
                phi_deg: c.lidar.phi.to_degrees(),
                scan_rate_hz: c.lidar.scan_rate,
                detection_height_m: c.lidar.detection_height,
                comm_power_w: c.lidar.comm_power,
                scan_power_w: c.lidar.scan_power,
                upload_rate_gbps: c.lidar.upload_rate / BYTES_PER_GB,
                octree_depth: c.lidar.octree_depth,
            },
            road: RoadSection {
                length_m: c.road.length,
                y_min_m: c.road.y_min,
                y_max_m: c.road.y_max,
                z_min_m: c.road.z_min,
                z_max_m: c.road.z_max,
                sector_ends_m: c.road.sector_ends.clone(),
                sector_scores: c.road.sector_scores.clone(),
            },
            limits: LimitsSection {
                bandwidth_gbps: c.limits.bandwidth / BYTES_PER_GB,
                energy_w: c.limits.energy,
            },
            model: ModelSection {
                lambda: c.lambda,
                eta: c.eta,
                num_elids: c.num_elids,
                throughput_penalty: c.penalty.throughput,
                energy_penalty: c.penalty.energy,
                width_rule: c.width_rule,
                angle_step_deg: c.angle_step.to_degrees(),
                length_step_m: c.length_step,
            },
            swarm: SwarmSection {
                num_particles: c.swarm.num_particles,
                inertia: c.swarm.inertia,
                cognitive: c.swarm.cognitive,
                social: c.swarm.social,
                max_iterations: c.swarm.max_iterations,
                improvement_tol: c.swarm.improvement_tol,
                stall_window: c.swarm.stall_window,
                seed: c.swarm.seed,
                velocity_clamp: c.swarm.velocity_clamp,
                binary_transfer: c.swarm.transfer,
            },
        }
    }
}
