//! Placement planning for elevated LiDAR (ELiD) units along an urban roadway.
//!
//! Each candidate unit is described by a roadway position, a mounting height
//! and a placed flag. The crate turns those decisions into coverage
//! trapezoids ([`geometry`]), worst-case data and energy loads
//! ([`datamodel`]), a relevance-weighted effective coverage ratio with
//! exterior penalties for the throughput and energy limits ([`objective`]),
//! and searches the space with a hybrid continuous/binary particle swarm
//! ([`solver`]). The [`oracle`] module holds brute-force checks that share
//! no code with the analytic path, and [`cli`] drives scenario files and
//! CSV output.
//!
//! ```no_run
//! use elid_planner::{config::ScenarioConfig, solver};
//!
//! let config = ScenarioConfig::table1();
//! let result = solver::solve(&config).unwrap();
//! println!("coverage {:.3} with {} units", result.best_coverage, result.lamps_placed());
//! ```

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod datamodel;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod oracle;
pub mod solver;

pub use config::{Limits, ScenarioConfig};
pub use error::{Error, Result};
pub use geometry::{CoverageFootprint, LidarSpec, Placement, RoadGeometry, WidthRule};
pub use objective::{Evaluation, FitnessBreakdown};
pub use solver::{BinaryTransfer, SolveResult, SwarmConfig};

/// Bytes per gigabyte. Decimal SI throughout.
pub const BYTES_PER_GB: f64 = 1e9;
