//! Runs the particle swarm on the baseline scenario and prints the plan and
//! a thinned convergence trace.
//!
//! cargo run --release --example solve [seed]

use elid_planner::config::ScenarioConfig;
use elid_planner::solver::solve;

fn main() -> elid_planner::Result<()> {
    let mut config = ScenarioConfig::table1();
    if let Some(seed) = std::env::args().nth(1) {
        config.swarm.seed = seed.parse().expect("seed must be an integer");
    }
    let result = solve(&config)?;

    println!(
        "seed {}: fitness {:.5}, coverage {:.4}, feasible {}, {} units, {} iterations",
        config.swarm.seed,
        result.best_fitness,
        result.best_coverage,
        result.feasible,
        result.lamps_placed(),
        result.iterations_run
    );
    for (i, p) in result.best_placements.iter().enumerate().filter(|(_, p)| p.placed) {
        println!("  unit {i:>2}: x = {:7.2} m, z = {:5.2} m", p.x, p.z);
    }

    let stride = (result.convergence_trace.len() / 10).max(1);
    for (t, point) in result.convergence_trace.iter().enumerate().step_by(stride) {
        println!("  iter {t:>4}: {:.5}", point.fitness);
    }
    Ok(())
}
