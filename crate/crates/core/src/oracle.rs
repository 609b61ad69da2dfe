//! Brute-force references for the analytic objective and the swarm.
//!
//! [`raster_coverage`] samples the roadway on a regular grid of columns and
//! never builds the point-of-interest partition. [`grid_search`] enumerates
//! every grid-aligned placement of one or two units.

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{CoverageFootprint, Placement, RoadGeometry};
use crate::objective;

/// Largest number of candidate plans [`grid_search`] will enumerate.
pub const GRID_LIMIT: f64 = 1e6;
/// Largest number of units [`grid_search`] accepts.
pub const GRID_MAX_UNITS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RasterMode {
    /// Along-road columns; the covered depth of each column is exact.
    Columns,
    /// Full 2-D grid; the covered depth is counted in lateral rows.
    Grid { lateral_resolution: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterConfig {
    /// Column width along the road, meters.
    pub resolution: f64,
    pub mode: RasterMode,
}

impl RasterConfig {
    pub fn columns(resolution: f64) -> Self {
        RasterConfig {
            resolution,
            mode: RasterMode::Columns,
        }
    }
}

/// Sums in fixed pairwise order so the result is independent of threading.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn score_at(road: &RoadGeometry, c: f64) -> f64 {
    let a = road.sector_ends.partition_point(|&end| end <= c);
    road.sector_scores[a.min(road.sector_scores.len() - 1)]
}

/// Midpoint-rule estimate of the effective coverage ratio.
pub fn raster_coverage(
    footprints: &[CoverageFootprint],
    placements: &[Placement],
    road: &RoadGeometry,
    eta: f64,
    raster: RasterConfig,
) -> Result<f64> {
    if !(raster.resolution > 0.0) {
        return Err(Error::Domain(format!(
            "raster resolution must be positive, got {}",
            raster.resolution
        )));
    }
    let road_width = road.y_max - road.y_min;
    let rows = match raster.mode {
        RasterMode::Columns => 0,
        RasterMode::Grid { lateral_resolution } => {
            if !(lateral_resolution > 0.0) {
                return Err(Error::Domain("lateral resolution must be positive".into()));
            }
            (road_width / lateral_resolution).ceil() as usize
        }
    };
    let columns = (road.length / raster.resolution).ceil() as usize;
    let live: Vec<&CoverageFootprint> = footprints
        .iter()
        .zip(placements)
        .filter(|(_, p)| p.placed)
        .map(|(fp, _)| fp)
        .collect();

    let depth_at = |c: f64| -> f64 {
        let reach = live
            .iter()
            .filter(|fp| fp.x_start <= c && c <= fp.x_end)
            .map(|fp| fp.l_width)
            .fold(0.0, f64::max);
        match raster.mode {
            RasterMode::Columns => reach.min(road_width),
            RasterMode::Grid { lateral_resolution } => {
                // Row k spans [k*dy, (k+1)*dy) from the near edge, trimmed to the road.
                (0..rows)
                    .map(|k| {
                        let lo = k as f64 * lateral_resolution;
                        let hi = ((k + 1) as f64 * lateral_resolution).min(road_width);
                        if (lo + hi) / 2.0 < reach {
                            hi - lo
                        } else {
                            0.0
                        }
                    })
                    .sum()
            }
        }
    };

    let contributions: Vec<f64> = (0..columns)
        .into_par_iter()
        .map(|i| {
            let lo = i as f64 * raster.resolution;
            let hi = (lo + raster.resolution).min(road.length);
            let c = 0.5 * (lo + hi);
            depth_at(c) * score_at(road, c) * (hi - lo)
        })
        .collect();
    Ok(pairwise_sum(&contributions) / (eta * road_width * road.length))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub placements: Vec<Placement>,
    pub fitness: f64,
    pub evaluated: usize,
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut values: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    if hi - values[n] > 1e-9 {
        values.push(hi);
    }
    values
}

/// Candidate states of a single unit: unplaced, or placed on the grid.
pub fn unit_candidates(road: &RoadGeometry, x_step: f64, z_step: f64) -> Vec<Placement> {
    let xs = axis(0.0, road.length, x_step);
    let zs = axis(road.z_min, road.z_max, z_step);
    let mut out = Vec::with_capacity(1 + xs.len() * zs.len());
    out.push(Placement::new(road.length / 2.0, road.z_min, false));
    for &x in &xs {
        for &z in &zs {
            out.push(Placement::new(x, z, true));
        }
    }
    out
}

/// Exhaustive minimum of the fitness over grid-aligned plans.
///
/// Unplaced units collapse to one candidate since their position does not
/// affect the fitness.
pub fn grid_search(config: &ScenarioConfig, x_step: f64, z_step: f64) -> Result<GridResult> {
    config.validate()?;
    if !(x_step > 0.0 && z_step > 0.0) {
        return Err(Error::Domain("grid steps must be positive".into()));
    }
    let m = config.num_elids;
    if m > GRID_MAX_UNITS {
        return Err(Error::Config(format!(
            "grid search supports at most {GRID_MAX_UNITS} units, got {m}"
        )));
    }
    let cands = unit_candidates(&config.road, x_step, z_step);
    let combinations = (cands.len() as f64).powi(m as i32);
    if combinations > GRID_LIMIT {
        return Err(Error::GridTooLarge {
            combinations,
            limit: GRID_LIMIT,
        });
    }
    let total = combinations as usize;
    let n = cands.len();
    let decode = |mut k: usize| -> Vec<Placement> {
        (0..m)
            .map(|_| {
                let c = cands[k % n];
                k /= n;
                c
            })
            .collect()
    };

    let (best_index, fitness) = (0..total)
        .into_par_iter()
        .map(|k| objective::fitness(&decode(k), config).map(|b| (k, b.fitness)))
        .try_reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| {
                let better = b.1 < a.1 || (b.1 == a.1 && b.0 < a.0);
                Ok(if better { b } else { a })
            },
        )?;
    Ok(GridResult {
        placements: decode(best_index),
        fitness,
        evaluated: total,
    })
}
