//! Cross-checks the analytic coverage against column and full 2-D rasters.
//!
//! cargo run --release --example oracle_check

use elid_planner::cli::oracle_check;
use elid_planner::config::ScenarioConfig;
use elid_planner::objective::evaluate;
use elid_planner::oracle::{raster_coverage, RasterConfig, RasterMode};
use elid_planner::Placement;

fn main() -> elid_planner::Result<()> {
    let config = ScenarioConfig::table1();

    for resolution in [0.5, 0.1, 0.05, 0.01] {
        let out = oracle_check(&config, resolution, 50, 3)?;
        println!("columns at {resolution:>5} m: max error {:.2e}", out.max_error());
    }

    let plan = vec![
        Placement::new(150.0, 20.0, true),
        Placement::new(420.0, 35.0, true),
        Placement::new(700.0, 48.0, true),
    ];
    let eval = evaluate(&plan, &config)?;
    let grid = RasterConfig {
        resolution: 0.1,
        mode: RasterMode::Grid {
            lateral_resolution: 0.05,
        },
    };
    let raster = raster_coverage(&eval.footprints, &plan, &config.road, config.eta, grid)?;
    println!(
        "\n2-D raster: {raster:.6} vs analytic {:.6}",
        eval.breakdown.coverage
    );
    Ok(())
}
