//! Worst-case octree data volume and energy draw of a unit.

use crate::error::{Error, Result};
use crate::geometry::{CoverageFootprint, LidarSpec};

/// Deepest octree supported before the density overflows practical ranges.
pub const MAX_OCTREE_DEPTH: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataEnergyProfile {
    /// Data density in bytes per cubic meter.
    pub g_cov: u64,
    /// Generated data, bytes.
    pub data: f64,
    /// Energy consumption, W.
    pub energy: f64,
}

/// Bytes per cubic meter for a full octree of depth `d`: `8^(d-2) + 12`.
pub fn octree_density(d: u32) -> Result<u64> {
    if d < 2 {
        return Err(Error::Domain(format!("octree depth must be at least 2, got {d}")));
    }
    if d > MAX_OCTREE_DEPTH {
        return Err(Error::Domain(format!(
            "octree depth {d} exceeds the supported maximum {MAX_OCTREE_DEPTH}"
        )));
    }
    Ok((1u64 << (3 * (d - 2))) + 12)
}

/// Detection volume times density, divided by the scan rate. Uses the full
/// trapezoid area.
pub fn data_generated(spec: &LidarSpec, fp: &CoverageFootprint) -> Result<f64> {
    let g = octree_density(spec.octree_depth)? as f64;
    Ok(spec.detection_height * fp.a_total * g / spec.scan_rate)
}

pub fn energy_consumed(spec: &LidarSpec, data: f64) -> f64 {
    spec.comm_power * data / spec.upload_rate + spec.scan_power / spec.scan_rate
}

pub fn profile(spec: &LidarSpec, fp: &CoverageFootprint) -> Result<DataEnergyProfile> {
    let data = data_generated(spec, fp)?;
    Ok(DataEnergyProfile {
        g_cov: octree_density(spec.octree_depth)?,
        data,
        energy: energy_consumed(spec, data),
    })
}
