//! Coverage trapezoid of a single unit at several mounting heights, under
//! both width rules.
//!
//! cargo run --example footprint

use elid_planner::config::ScenarioConfig;
use elid_planner::geometry::footprint_with;
use elid_planner::{Placement, WidthRule};

fn main() -> elid_planner::Result<()> {
    let config = ScenarioConfig::table1();
    let road = &config.road;
    println!(
        "{:>5} {:>8} {:>8} {:>8} {:>9} {:>9} {:>10} {:>10}",
        "z", "omega", "l_near", "l_far", "width+", "width-", "a_total", "a_rect"
    );
    for z in [15.0, 20.0, 30.0, 40.0, 50.0] {
        let p = Placement::new(500.0, z, true);
        let plus = footprint_with(&config.lidar, road, &p, WidthRule::AsWritten)?;
        let minus = footprint_with(&config.lidar, road, &p, WidthRule::NearEdge)?;
        println!(
            "{z:>5.1} {:>8.4} {:>8.2} {:>8.2} {:>9.2} {:>9.2} {:>10.1} {:>10.1}",
            plus.omega,
            plus.l_near,
            plus.l_far,
            plus.l_width,
            minus.l_width,
            plus.a_total,
            plus.a_rect
        );
    }

    // Near the road end the rectangle is clipped to the road.
    let edge = footprint_with(&config.lidar, road, &Placement::new(20.0, 30.0, true), WidthRule::AsWritten)?;
    println!(
        "\nunit at x=20 m: extent [{:.2}, {:.2}] m, capped depth {:.2} m",
        edge.x_start,
        edge.x_end,
        edge.capped_width(road)
    );
    Ok(())
}
