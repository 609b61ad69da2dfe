//! Worst-case octree data volume and power draw as the octree depth grows.
//!
//! cargo run --example data_energy

use elid_planner::config::ScenarioConfig;
use elid_planner::datamodel::{self, octree_density};
use elid_planner::geometry::footprint;
use elid_planner::{Placement, BYTES_PER_GB};

fn main() -> elid_planner::Result<()> {
    let mut config = ScenarioConfig::table1();
    let fp = footprint(&config.lidar, &config.road, &Placement::new(500.0, 40.0, true))?;
    println!("footprint area at z=40 m: {:.1} m^2\n", fp.a_total);
    println!("{:>3} {:>12} {:>12} {:>10}", "d", "G_cov", "data (GB)", "power (W)");
    for d in 2..=10 {
        config.lidar.octree_depth = d;
        let p = datamodel::profile(&config.lidar, &fp)?;
        println!(
            "{d:>3} {:>12} {:>12.4} {:>10.3}",
            octree_density(d)?,
            p.data / BYTES_PER_GB,
            p.energy
        );
    }
    Ok(())
}
