//! Scores a hand-written plan: coverage, partition cells and constraint
//! slack.
//!
//! cargo run --example evaluate_plan

use elid_planner::config::ScenarioConfig;
use elid_planner::objective::evaluate;
use elid_planner::{Placement, WidthRule};

fn main() -> elid_planner::Result<()> {
    let plan: Vec<Placement> = [125.0, 375.0, 625.0, 875.0]
        .into_iter()
        .map(|x| Placement::new(x, 40.0, true))
        .collect();

    for rule in [WidthRule::AsWritten, WidthRule::NearEdge] {
        let mut config = ScenarioConfig::sparse();
        config.width_rule = rule;
        let eval = evaluate(&plan, &config)?;
        let b = &eval.breakdown;
        println!(
            "{rule:?}: coverage {:.4}, fitness {:.4}, throughput h = {:+.4}, feasible {}",
            b.coverage, b.fitness, eval.penalties.throughput.h, b.feasible
        );
    }

    let config = ScenarioConfig::sparse();
    let eval = evaluate(&plan, &config)?;
    println!("\n{:>9} {:>9} {:>7} {:>6} {:>9}", "lo", "hi", "width", "gamma", "area");
    for c in eval.cells(&config.road) {
        println!(
            "{:>9.2} {:>9.2} {:>7.2} {:>6.3} {:>9.1}",
            c.lo, c.hi, c.width, c.gamma, c.area
        );
    }
    Ok(())
}
