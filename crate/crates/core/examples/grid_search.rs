//! Exhaustive search on a two-unit road, compared with the swarm.
//!
//! cargo run --release --example grid_search

use elid_planner::config::ScenarioConfig;
use elid_planner::oracle::grid_search;
use elid_planner::solver::solve;
use elid_planner::RoadGeometry;

fn main() -> elid_planner::Result<()> {
    let mut config = ScenarioConfig::table1();
    config.num_elids = 2;
    config.lambda = 0.05;
    config.lidar.theta = 60f64.to_radians();
    config.road = RoadGeometry {
        length: 140.0,
        y_min: 5.0,
        y_max: 20.0,
        z_min: 15.0,
        z_max: 18.0,
        sector_ends: vec![40.0, 100.0, 140.0],
        sector_scores: vec![1.0, 0.4, 0.9],
    };

    let grid = grid_search(&config, 1.0, 0.5)?;
    println!("grid: fitness {:.5} after {} plans", grid.fitness, grid.evaluated);
    for p in &grid.placements {
        println!("  x = {:6.1}, z = {:4.1}, placed {}", p.x, p.z, p.placed);
    }

    for seed in 0..5 {
        config.swarm.seed = seed;
        let r = solve(&config)?;
        let gap = (r.best_fitness - grid.fitness) / grid.fitness.abs();
        println!("swarm seed {seed}: fitness {:.5} ({:+.2}% vs grid)", r.best_fitness, 100.0 * gap);
    }
    Ok(())
}
